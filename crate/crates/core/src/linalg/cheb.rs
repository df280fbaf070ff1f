//! Chebyshev expansion of the decaying exponential on an interval, with the
//! modified Bessel coefficients computed by Miller's backward recurrence.
//!
//! For a symmetric operator `A` with spectrum inside `[0, L]`, the action of
//! `exp(-t A)` is evaluated as a short Chebyshev series in the normalized
//! operator `U = (2/L) A - I`; the truncation error is bounded by the tail of
//! the scaled Bessel coefficients, which decay super-exponentially past
//! degree `~ tL/2`.

use num_complex::Complex64;

/// Scaled modified Bessel values `e^{-a} I_k(a)` for `k = 0..=k_max`,
/// computed by backward recurrence and normalized with
/// `I_0 + 2 sum_k I_k = e^a`.
pub fn bessel_i_scaled(a: f64, k_max: usize) -> Vec<f64> {
    assert!(a >= 0.0 && a.is_finite(), "need finite a >= 0, got {a}");
    if a == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return out;
    }
    // Start well above both k_max and the turning point k ~ a.
    let start = (k_max as f64)
        .max(a)
        .max(8.0 * (a + 1.0).sqrt() + 20.0) as usize
        + (k_max / 2)
        + 16;
    let mut b_hi = 0.0f64;
    let mut b = 1e-280f64;
    let mut out = vec![0.0; k_max + 1];
    let mut sum = 0.0f64; // accumulates b_0 + 2*sum_{k>=1} b_k as we descend
    for k in (0..=start).rev() {
        let b_lo = b_hi + (2.0 * (k as f64 + 1.0) / a) * b;
        b_hi = b;
        b = b_lo;
        // b now holds the unnormalized value at index k.
        if k == 0 {
            sum += b;
        } else {
            sum += 2.0 * b;
        }
        if k <= k_max {
            out[k] = b;
        }
        if b.abs() > 1e250 {
            let s = 1e-250;
            b *= s;
            b_hi *= s;
            sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
    out
}

/// Chebyshev coefficients of `x -> exp(-t x)` on `[0, L]`:
/// `exp(-t x) = sum_k c_k T_k(2x/L - 1)`, truncated where the coefficients
/// fall below `1e-15` (the series has total mass `<= 1`).
pub fn chebyshev_exp_coefficients(t: f64, l: f64) -> Vec<f64> {
    assert!(t >= 0.0 && l >= 0.0, "need t, L >= 0");
    let a = t * l / 2.0;
    if a == 0.0 {
        return vec![1.0];
    }
    // Generous degree cap: the coefficients die off shortly past k ~ a.
    let k_cap = (a + 12.0 * (a + 4.0).sqrt() + 24.0) as usize;
    let scaled = bessel_i_scaled(a, k_cap);
    let mut coeffs: Vec<f64> = scaled
        .iter()
        .enumerate()
        .map(|(k, &ik)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let two = if k == 0 { 1.0 } else { 2.0 };
            two * sign * ik
        })
        .collect();
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() < 1e-15 {
        coeffs.pop();
    }
    coeffs
}

/// Applies `exp(-t A)` to `v` through matrix-vector products with `A`, whose
/// spectrum must lie in `[0, L]`.
pub fn chebyshev_heat_apply<F>(apply: F, l: f64, t: f64, v: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let coeffs = chebyshev_exp_coefficients(t, l);
    let n = v.len();
    let u_apply = |x: &[Complex64]| -> Vec<Complex64> {
        if l == 0.0 {
            return vec![Complex64::default(); n];
        }
        let ax = apply(x);
        (0..n).map(|i| (2.0 / l) * ax[i] - x[i]).collect()
    };

    // Forward three-term recurrence on Chebyshev vectors.
    let mut t_prev: Vec<Complex64> = v.to_vec(); // T_0 v
    let mut acc: Vec<Complex64> = t_prev.iter().map(|&x| coeffs[0] * x).collect();
    if coeffs.len() == 1 {
        return acc;
    }
    let mut t_cur = u_apply(v); // T_1 v
    for i in 0..n {
        acc[i] += coeffs[1] * t_cur[i];
    }
    for &c in &coeffs[2..] {
        let ut = u_apply(&t_cur);
        let mut t_next = vec![Complex64::default(); n];
        for i in 0..n {
            t_next[i] = 2.0 * ut[i] - t_prev[i];
            acc[i] += c * t_next[i];
        }
        t_prev = t_cur;
        t_cur = t_next;
    }
    acc
}
