//! Heat semigroups `e^{-tL}` of windowed Laplacians, the boundary coupling
//! constant of a window, and the truncation-error certificate.
//!
//! The semigroup of a window and the semigroup of a larger reference window
//! differ only through the edges that cross the smaller boundary; the
//! operator gap is supported on the exterior boundary and its norm is
//! controlled by the largest singular value of the crossing-conductance
//! matrix (equivalently, the Perron-Frobenius eigenvalue of the symmetric
//! two-sided boundary matrix).  That yields the certificate
//! `||S(t)v - S_N(t)v|| <= lambda_PF * t * ||v||` for fields supported in
//! the window, which [`truncation_error_check`] evaluates numerically.
//!
//! Throughout, the truncated generator is the compressed operator (full
//! weighted degrees on the diagonal): that is the choice for which the
//! boundary-difference formula is exact on window-supported fields.

use num_complex::Complex64;

use crate::error::{LapnetError, Result};
use crate::graph::{materialize, GraphSystem, Window, WindowedGraph};
use crate::linalg::{chebyshev_heat_apply, extreme_eigen_bounds, sigma_max_small, sym_eigen};
use crate::operator::{assemble_matrix, BandedMatrix, BoundaryMode, VertexField};
use crate::spectral::{apply_spectral_function, FunctionMode, SpectralDecomposition};

/// Above this size the heat action switches from a dense eigendecomposition
/// to a Chebyshev polynomial expansion of `e^{-tx}`.  The expansion is
/// cheaper from a few hundred vertices on and exact to round-off, so the
/// cap mainly preserves the exact-diagonalization path for small sections.
pub const DENSE_HEAT_CAP: usize = 192;

fn symmetry_gate(m: &BandedMatrix) -> Result<f64> {
    if !m.is_real() {
        return Err(LapnetError::NotSymmetric(
            "matrix has complex entries".into(),
        ));
    }
    let scale = (0..m.n())
        .flat_map(|i| m.row(i).iter().map(|&(_, z)| z.norm()))
        .fold(0.0f64, f64::max);
    if m.hermitian_defect() > 1e-12 * scale.max(1.0) {
        return Err(LapnetError::NotSymmetric(format!(
            "asymmetry {:.3e} exceeds tolerance",
            m.hermitian_defect()
        )));
    }
    Ok(scale)
}

/// Applies the heat operator `e^{-tM}` to a field.
///
/// `M` must be real symmetric positive semidefinite; an indefinite section
/// (for example a truncated momentum-position Hamiltonian) is rejected with
/// the estimated bottom eigenvalue rather than silently exponentiated.
/// Dense diagonalization is used up to [`DENSE_HEAT_CAP`]; larger matrices
/// go through a Chebyshev expansion on a Gershgorin interval, exact to
/// round-off for the spectrum sizes involved.
pub fn heat_apply(m: &BandedMatrix, t: f64, v: &VertexField) -> Result<VertexField> {
    if !t.is_finite() || t < 0.0 {
        return Err(LapnetError::Domain(format!(
            "heat time must be finite and nonnegative, got {t}"
        )));
    }
    if v.len() != m.n() {
        return Err(LapnetError::Domain(format!(
            "field length {} does not match matrix size {}",
            v.len(),
            m.n()
        )));
    }
    let scale = symmetry_gate(m)?;
    let (lo, hi) = m.gershgorin_bounds()?;
    let psd_tol = 1e-9 * scale.max(1.0);
    if lo < -psd_tol {
        // Gershgorin alone cannot certify positivity; measure the bottom.
        let min = if m.n() <= DENSE_HEAT_CAP {
            let dec = sym_eigen(&m.to_dense_real()?)?;
            dec.values[0]
        } else {
            let radius = lo.abs().max(hi.abs()).max(1e-300);
            let apply = |x: &[f64]| -> Vec<f64> {
                let xc: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
                m.apply(&xc).into_iter().map(|z| z.re).collect()
            };
            extreme_eigen_bounds(m.n(), apply, radius, 1e-9, 3000).0
        };
        if min < -psd_tol {
            return Err(LapnetError::NotPsd(min));
        }
    }
    if t == 0.0 {
        return Ok(v.clone());
    }
    if m.n() <= DENSE_HEAT_CAP {
        let dec = sym_eigen(&m.to_dense_real()?)?;
        let dec = SpectralDecomposition {
            values: dec.values,
            vectors: dec.vectors,
        };
        apply_spectral_function(&dec, |x| (-t * x).exp(), v, FunctionMode::Strict)
    } else {
        let l = hi.max(0.0);
        let apply = |x: &[Complex64]| m.apply(x);
        let out = chebyshev_heat_apply(apply, l, t, v.values());
        Ok(VertexField::from_complex(out))
    }
}

/// Boundary data of a window: the edges leaving it and the coupling
/// constant that controls truncation error.
#[derive(Clone, Debug)]
pub struct BoundaryCoupling {
    /// Largest singular value of the crossing-conductance matrix; equals
    /// the Perron-Frobenius eigenvalue of the symmetric boundary matrix
    /// `[[0, C], [C^T, 0]]`.
    pub lambda_pf: f64,
    /// Number of edges with exactly one endpoint inside the window.
    pub crossing_edges: usize,
    /// Interior vertices incident to a crossing edge.
    pub interior_boundary: usize,
    /// Exterior vertices incident to a crossing edge.
    pub exterior_boundary: usize,
}

/// Computes the boundary coupling of a window.  A window with no crossing
/// edges (a whole finite graph, or a union of components) has coupling zero
/// and its truncation is exact.
pub fn boundary_coupling(w: &WindowedGraph) -> Result<BoundaryCoupling> {
    let crossing = w.crossing();
    if crossing.is_empty() {
        return Ok(BoundaryCoupling {
            lambda_pf: 0.0,
            crossing_edges: 0,
            interior_boundary: 0,
            exterior_boundary: 0,
        });
    }
    let mut interior: Vec<usize> = crossing.iter().map(|&(i, _, _)| i).collect();
    interior.sort_unstable();
    interior.dedup();
    let mut exterior: Vec<&crate::graph::Vertex> =
        crossing.iter().map(|(_, y, _)| y).collect();
    exterior.sort();
    exterior.dedup();
    let col_of = |i: usize| interior.binary_search(&i).unwrap();
    let row_of = |y: &crate::graph::Vertex| exterior.binary_search(&y).unwrap();
    let mut c = vec![vec![0.0f64; interior.len()]; exterior.len()];
    for (i, y, w_xy) in crossing {
        c[row_of(y)][col_of(*i)] += *w_xy;
    }
    let lambda_pf = sigma_max_small(&c, 1e-12, 50_000);
    Ok(BoundaryCoupling {
        lambda_pf,
        crossing_edges: crossing.len(),
        interior_boundary: interior.len(),
        exterior_boundary: exterior.len(),
    })
}

/// The boundary-difference field: for `u` supported on the window, the gap
/// between the ambient Laplacian and the compressed one is supported on the
/// exterior boundary, where it equals `-sum over interior neighbors of
/// c(xy) u(y)`.  Returned as a field on the reference window, which must
/// contain the window and its exterior boundary.
pub fn truncation_difference(
    small: &WindowedGraph,
    big: &WindowedGraph,
    u: &VertexField,
) -> Result<VertexField> {
    if u.len() != small.len() {
        return Err(LapnetError::Domain(format!(
            "field length {} does not match window size {}",
            u.len(),
            small.len()
        )));
    }
    let mut out = VertexField::zeros(big.len());
    for (i, y, c) in small.crossing() {
        let j = big.index_of(y).ok_or_else(|| {
            LapnetError::Window(format!(
                "reference window does not contain boundary neighbor {y:?}"
            ))
        })?;
        let cur = out.get(j);
        out.set(j, cur - Complex64::new(*c, 0.0) * u.get(*i));
    }
    Ok(out)
}

/// Outcome of the truncation-error certificate.
#[derive(Clone, Copy, Debug)]
pub struct TruncationCheck {
    pub t: f64,
    pub lambda_pf: f64,
    /// Measured `||S_ref(t) v - S_window(t) v||` with `v` embedded in the
    /// reference window.
    pub lhs: f64,
    /// Certified ceiling `lambda_pf * t * ||v||`.
    pub bound: f64,
    pub pass: bool,
}

/// Evaluates the truncation-error bound for a window against a larger
/// reference window.
///
/// `v` lives on the truncation window; both heat actions use compressed
/// generators.  The reference window stands in for the infinite graph, so
/// it should extend several boundary-collars beyond the window (the
/// certificate is about the window's boundary, and the reference's own
/// truncation error must be negligible in comparison).
pub fn truncation_error_check(
    g: &GraphSystem,
    window: &Window,
    reference: &Window,
    t: f64,
    v: &VertexField,
) -> Result<TruncationCheck> {
    let small = materialize(g, window)?;
    let big = materialize(g, reference)?;
    if v.len() != small.len() {
        return Err(LapnetError::Domain(format!(
            "field length {} does not match window size {}",
            v.len(),
            small.len()
        )));
    }
    // Embed the window into the reference.
    let mut embed = vec![0usize; small.len()];
    for i in 0..small.len() {
        embed[i] = big.index_of(small.vertex(i)).ok_or_else(|| {
            LapnetError::Window(format!(
                "reference window does not contain window vertex {:?}",
                small.vertex(i)
            ))
        })?;
    }
    let m_small = assemble_matrix(&small, BoundaryMode::Compressed)?;
    let m_big = assemble_matrix(&big, BoundaryMode::Compressed)?;
    let mut v_big = VertexField::zeros(big.len());
    for i in 0..small.len() {
        v_big.set(embed[i], v.get(i));
    }
    let u_small = heat_apply(&m_small, t, v)?;
    let u_big = heat_apply(&m_big, t, &v_big)?;
    let mut diff = u_big;
    for i in 0..small.len() {
        let cur = diff.get(embed[i]);
        diff.set(embed[i], cur - u_small.get(i));
    }
    let lhs = diff.norm();
    let lambda_pf = boundary_coupling(&small)?.lambda_pf;
    let bound = lambda_pf * t * v.norm();
    let pass = lhs <= bound * (1.0 + 1e-9) + 1e-12;
    Ok(TruncationCheck {
        t,
        lambda_pf,
        lhs,
        bound,
        pass,
    })
}
