//! Direct discrete Fourier transforms over rectangular index boxes.
//!
//! These are plain O(N^2)-per-axis matrix DFTs with precomputed twiddle
//! tables.  The periodic boxes in this crate stay small (N <= a few hundred
//! per axis), so the quadratic transform is fast enough and keeps the
//! dependency surface and the floating-point evaluation order fixed.

use num_complex::Complex64;

/// In-place forward DFT along every axis of a row-major array with the given
/// shape: `X[k] = sum_j x[j] exp(-2 pi i j k / N)` per axis.
pub fn dft_forward(data: &mut [Complex64], shape: &[usize]) {
    transform(data, shape, false);
}

/// In-place inverse DFT along every axis, including the `1/N` factor per
/// axis, so `dft_inverse(dft_forward(x)) == x` up to round-off.
pub fn dft_inverse(data: &mut [Complex64], shape: &[usize]) {
    transform(data, shape, true);
}

fn transform(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "data length does not match shape");
    if total == 0 {
        return;
    }
    for axis in 0..shape.len() {
        let n = shape[axis];
        if n <= 1 {
            continue;
        }
        let stride: usize = shape[axis + 1..].iter().product();
        let sign = if inverse { 1.0 } else { -1.0 };
        // Twiddle table indexed by (j*k) mod n.
        let tw: Vec<Complex64> = (0..n)
            .map(|m| {
                let ang = sign * 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                Complex64::new(ang.cos(), ang.sin())
            })
            .collect();
        let scale = if inverse { 1.0 / n as f64 } else { 1.0 };

        let outer: usize = shape[..axis].iter().product();
        let mut line = vec![Complex64::default(); n];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for j in 0..n {
                    line[j] = data[base + j * stride];
                }
                for k in 0..n {
                    let mut acc = Complex64::default();
                    for (j, &x) in line.iter().enumerate() {
                        acc += x * tw[(j * k) % n];
                    }
                    data[base + k * stride] = acc * scale;
                }
            }
        }
    }
}
