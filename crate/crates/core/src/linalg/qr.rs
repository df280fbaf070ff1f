//! Exact null-space extraction for short banded systems via Householder QR
//! of the adjoint.
//!
//! Given a banded matrix `A` with `R` rows and `N > R` columns and full row
//! rank, the last `N - R` columns of the `Q` factor of `A^H = Q R'` form an
//! orthonormal basis of the right null space of `A`.  Householder vectors
//! inherit the band profile, so the factorization and the basis extraction
//! both run in `O(R b^2)` for bandwidth `b` — no dense matrix is ever formed.

use num_complex::Complex64;

use crate::error::{LapnetError, Result};

/// A banded rectangular matrix stored by rows: each row holds its first
/// column index and a contiguous run of values.
#[derive(Debug, Clone)]
pub struct BandedRows {
    pub n_cols: usize,
    pub rows: Vec<(usize, Vec<Complex64>)>,
}

impl BandedRows {
    /// Largest distance between a row index and the ends of its support;
    /// bounds the Householder vector length below.
    pub fn band_radius(&self) -> usize {
        let mut b = 0usize;
        for (j, (start, vals)) in self.rows.iter().enumerate() {
            let end = start + vals.len().saturating_sub(1);
            b = b.max(j.saturating_sub(*start)).max(end.saturating_sub(j));
        }
        b
    }

    /// `A x` for a full-length vector.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|(start, vals)| {
                vals.iter()
                    .enumerate()
                    .map(|(k, &a)| a * x[start + k])
                    .sum()
            })
            .collect()
    }
}

/// Orthonormal basis of the right null space of a full-row-rank banded
/// system, computed exactly (dimension `n_cols - n_rows`).
///
/// Errors if a QR pivot collapses, which would mean the rows are numerically
/// rank-deficient and the null space is larger than the shape suggests.
pub fn banded_nullspace(a: &BandedRows) -> Result<Vec<Vec<Complex64>>> {
    let n = a.n_cols;
    let r = a.rows.len();
    if r >= n {
        return Err(LapnetError::Internal(format!(
            "banded_nullspace needs fewer rows than columns, got {r} x {n}"
        )));
    }
    let b = a.band_radius();
    for (j, (start, vals)) in a.rows.iter().enumerate() {
        if start + vals.len() > n {
            return Err(LapnetError::Internal(format!(
                "row {j} overruns the column count"
            )));
        }
    }

    let scale: f64 = a
        .rows
        .iter()
        .flat_map(|(_, vals)| vals.iter().map(|z| z.norm()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let pivot_tol = 1e-10 * scale;

    // Householder reflectors H_j = I - beta_j v_j v_j^H, with v_j supported
    // on rows j..=j+b of the adjoint's column space.
    let mut reflectors: Vec<(usize, Vec<Complex64>, f64)> = Vec::with_capacity(r);

    for j in 0..r {
        // Working window of the adjoint's column j: rows j-2b ..= j+b cover
        // every entry that previous reflectors can have touched.
        let w_lo = j.saturating_sub(2 * b);
        let w_hi = (j + b).min(n - 1);
        let mut x = vec![Complex64::default(); w_hi - w_lo + 1];
        let (start, vals) = &a.rows[j];
        for (k, &z) in vals.iter().enumerate() {
            let row = start + k;
            if row >= w_lo && row <= w_hi {
                x[row - w_lo] = z.conj();
            } else if z != Complex64::default() {
                return Err(LapnetError::Internal(format!(
                    "row {j} support escapes the band window"
                )));
            }
        }
        for (k, v, beta) in reflectors.iter() {
            let k = *k;
            if k < w_lo || k > w_hi {
                continue;
            }
            let hi = (k + v.len() - 1).min(w_hi);
            let mut s = Complex64::default();
            for row in k..=hi {
                s += v[row - k].conj() * x[row - w_lo];
            }
            if s != Complex64::default() {
                let s = s * *beta;
                for row in k..=hi {
                    x[row - w_lo] -= s * v[row - k];
                }
            }
        }
        // Build the reflector that zeroes rows j+1..=j+b of this column.
        let y: Vec<Complex64> = (j..=w_hi).map(|row| x[row - w_lo]).collect();
        let y_norm: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if y_norm <= pivot_tol {
            return Err(LapnetError::Internal(format!(
                "rank deficiency at column {j}: pivot {y_norm:.3e}"
            )));
        }
        let phase = if y[0] == Complex64::default() {
            Complex64::new(1.0, 0.0)
        } else {
            y[0] / y[0].norm()
        };
        let alpha = -phase * y_norm;
        let mut v = y;
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv <= 0.0 {
            // Column already reduced; record an identity reflector.
            reflectors.push((j, vec![Complex64::default()], 0.0));
            continue;
        }
        reflectors.push((j, v, 2.0 / vv));
    }

    // Null basis: q_m = H_0 H_1 ... H_{r-1} e_m for m = r..n-1.
    let mut basis = Vec::with_capacity(n - r);
    for m in r..n {
        let mut q = vec![Complex64::default(); n];
        q[m] = Complex64::new(1.0, 0.0);
        for (k, v, beta) in reflectors.iter().rev() {
            if *beta == 0.0 {
                continue;
            }
            let k = *k;
            let hi = (k + v.len() - 1).min(n - 1);
            let mut s = Complex64::default();
            for row in k..=hi {
                s += v[row - k].conj() * q[row];
            }
            if s != Complex64::default() {
                let s = s * *beta;
                for row in k..=hi {
                    q[row] -= s * v[row - k];
                }
            }
        }
        basis.push(q);
    }
    Ok(basis)
}
