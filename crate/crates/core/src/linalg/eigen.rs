//! Cyclic Jacobi eigensolver for real symmetric matrices, plus a small
//! complex Hermitian variant built on top of it.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{LapnetError, Result};

/// Eigendecomposition of a real symmetric matrix: `a = V diag(values) V^T`
/// with `values` ascending and `V` column-orthonormal.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

const MAX_SWEEPS: usize = 64;
const OFF_TOL: f64 = 1e-14;

/// Full eigendecomposition by cyclic-by-rows Jacobi rotations.
///
/// Deterministic: fixed sweep order, no pivot search.  Converges to an
/// off-diagonal Frobenius mass below `1e-14` times the matrix norm in a
/// handful of sweeps; sorted output with matching eigenvector columns.
pub fn sym_eigen(a: &Array2<f64>) -> Result<SymEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LapnetError::NotSymmetric(format!(
            "matrix is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(SymEigen {
            values: vec![],
            vectors: Array2::zeros((0, 0)),
        });
    }

    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += m[[p, q]] * m[[p, q]];
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= OFF_TOL * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= OFF_TOL * norm / (n as f64) {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Rotate rows/columns p and q of m.
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                // Accumulate the rotation into the eigenvector matrix.
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[[k, dst]] = v[[k, src]];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Eigendecomposition of a small complex Hermitian matrix via the real
/// symmetric embedding `H = X + iY  ->  [[X, -Y], [Y, X]]`.
///
/// The embedding doubles every eigenvalue; we keep one copy of each pair and
/// reconstruct a complex eigenvector from the real one.  Intended for the
/// tiny Gram matrices of the half-line probes (dimension up to ~10).
pub fn herm_eigen_small(h: &[Vec<Complex64>]) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let b = h.len();
    if b == 0 {
        return Ok((vec![], vec![]));
    }
    for row in h {
        if row.len() != b {
            return Err(LapnetError::NotSymmetric("ragged Hermitian input".into()));
        }
    }
    let mut e = Array2::zeros((2 * b, 2 * b));
    for i in 0..b {
        for j in 0..b {
            let z = h[i][j];
            e[[i, j]] = z.re;
            e[[i + b, j + b]] = z.re;
            e[[i, j + b]] = -z.im;
            e[[i + b, j]] = z.im;
        }
    }
    let dec = sym_eigen(&e)?;
    // Pairs are adjacent after sorting; take every other one.
    let mut values = Vec::with_capacity(b);
    let mut vectors = Vec::with_capacity(b);
    for k in 0..b {
        let col = 2 * k;
        values.push(dec.values[col]);
        let mut vec_c = Vec::with_capacity(b);
        for i in 0..b {
            vec_c.push(Complex64::new(dec.vectors[[i, col]], dec.vectors[[i + b, col]]));
        }
        // Normalize (the embedded vector has unit length; its complex form does too,
        // but re-normalize defensively).
        let norm: f64 = vec_c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in &mut vec_c {
                *z /= norm;
            }
        }
        vectors.push(vec_c);
    }
    Ok((values, vectors))
}
