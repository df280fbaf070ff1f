//! Conjugate gradient for positive semidefinite systems with a known
//! nullspace, handled by projection.

/// Result of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    /// True residual norm `||b - A x||` recomputed at exit.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `A x = b` for symmetric positive semidefinite `A`.
///
/// `project` must orthogonally project a vector onto the range of `A`
/// (equivalently, remove the nullspace component); it is applied to the
/// right-hand side and re-applied to the residual every iteration so
/// round-off cannot let the iterates drift along the nullspace.  Convergence
/// is declared when the recurrence residual drops below `rel_tol * ||b||`.
pub fn conjugate_gradient<A, P>(
    apply: A,
    b: &[f64],
    project: P,
    rel_tol: f64,
    max_iter: usize,
) -> CgOutcome
where
    A: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&mut [f64]),
{
    let n = b.len();
    let mut rhs = b.to_vec();
    project(&mut rhs);
    let b_norm = norm(&rhs).max(1e-300);

    let mut x = vec![0.0; n];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    let mut converged = rr.sqrt() <= rel_tol * b_norm;
    // Round-off floors the attainable residual; stop once progress stalls
    // rather than spinning to the iteration cap.
    let mut best = rr;
    let mut since_best = 0usize;

    while !converged && iterations < max_iter {
        let ap = apply(&p);
        let p_ap = dot(&p, &ap);
        if p_ap <= 0.0 || !p_ap.is_finite() {
            break; // curvature lost to round-off; return best iterate
        }
        let alpha = rr / p_ap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        project(&mut r);
        let rr_next = dot(&r, &r);
        iterations += 1;
        if rr_next.sqrt() <= rel_tol * b_norm {
            converged = true;
            break;
        }
        if rr_next < best * 0.999999 {
            best = rr_next;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > 200 {
                break;
            }
        }
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }

    let ax = apply(&x);
    let mut true_r = vec![0.0; n];
    for i in 0..n {
        true_r[i] = rhs[i] - ax[i];
    }
    let residual_norm = norm(&true_r);
    CgOutcome {
        x,
        residual_norm,
        iterations,
        converged,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
