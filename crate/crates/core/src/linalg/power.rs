//! Deterministic power iterations: largest singular value of a small dense
//! matrix, and outer eigenvalue bounds for large symmetric operators.

/// Largest singular value of a dense `rows x cols` matrix given by value,
/// via power iteration on `A^T A`.  Deterministic start vector; converges to
/// `tol` relative change or stops after `max_iter` steps.
pub fn sigma_max_small(a: &[Vec<f64>], tol: f64, max_iter: usize) -> f64 {
    let rows = a.len();
    if rows == 0 {
        return 0.0;
    }
    let cols = a[0].len();
    if cols == 0 {
        return 0.0;
    }
    // Slightly sloped start so we are not orthogonal to the top vector by
    // accident of symmetry.
    let mut x: Vec<f64> = (0..cols).map(|j| 1.0 + 1e-6 * j as f64).collect();
    normalize(&mut x);
    let mut sigma = 0.0;
    for _ in 0..max_iter {
        // y = A x; x' = A^T y.
        let y: Vec<f64> = (0..rows)
            .map(|i| a[i].iter().zip(&x).map(|(aij, xj)| aij * xj).sum())
            .collect();
        let mut xn = vec![0.0; cols];
        for i in 0..rows {
            for j in 0..cols {
                xn[j] += a[i][j] * y[i];
            }
        }
        let lambda = normalize(&mut xn);
        let sigma_new = lambda.sqrt();
        let done = (sigma_new - sigma).abs() <= tol * sigma_new.max(1e-300);
        x = xn;
        sigma = sigma_new;
        if done {
            break;
        }
    }
    sigma
}

/// Approximate smallest and largest eigenvalues of a symmetric operator
/// known only through matrix-vector products, via shifted power iterations.
///
/// `radius` must dominate the spectral radius (a Gershgorin bound works).
/// Used for matrices too large to diagonalize densely; the returned pair
/// brackets the spectrum to roughly `tol` relative accuracy for separated
/// extremes, and degrades gracefully (toward the interior) otherwise.
pub fn extreme_eigen_bounds<A>(n: usize, apply: A, radius: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    // rho(radius*I - A) = radius - lambda_min,  rho(radius*I + A) = radius + lambda_max.
    let lo = radius - dominant(n, |x| shift_apply(&apply, x, radius, -1.0), tol, max_iter);
    let hi = dominant(n, |x| shift_apply(&apply, x, radius, 1.0), tol, max_iter) - radius;
    (lo, hi)
}

fn shift_apply<A>(apply: &A, x: &[f64], radius: f64, sign: f64) -> Vec<f64>
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    let ax = apply(x);
    x.iter()
        .zip(ax)
        .map(|(xi, axi)| radius * xi + sign * axi)
        .collect()
}

fn dominant<A>(n: usize, apply: A, tol: f64, max_iter: usize) -> f64
where
    A: Fn(&[f64]) -> Vec<f64>,
{
    // Fixed-seed pseudo-random start: a structured start (all-ones, ramps)
    // can sit in an eigenspace of the operator — e.g. the kernel vector of a
    // Laplacian — and stall the iteration at the wrong eigenvalue while the
    // step-to-step change looks converged.
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut x: Vec<f64> = (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    normalize(&mut x);
    let mut lambda = 0.0;
    let mut stable = 0usize;
    for it in 0..max_iter {
        let mut y = apply(&x);
        let l = normalize(&mut y);
        x = y;
        // Demand a short run of stationary estimates past a warm-up, so a
        // slow-to-rotate start cannot trigger a premature stop.
        if it >= 32 && (l - lambda).abs() <= tol * l.max(1e-300) {
            stable += 1;
        } else {
            stable = 0;
        }
        lambda = l;
        if stable >= 3 {
            break;
        }
    }
    lambda
}

fn normalize(x: &mut [f64]) -> f64 {
    let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
    n
}
