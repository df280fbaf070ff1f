//! Dense and structured linear algebra used by the rest of the crate.
//!
//! Everything here is hand-rolled on purpose: the workloads are small enough
//! (dense symmetric eigenproblems to a few thousand, banded factorizations,
//! short Krylov loops) that deterministic, dependency-free routines are worth
//! more than peak speed.

mod cheb;
mod cg;
mod dft;
mod eigen;
mod power;
mod qr;

pub use cheb::{bessel_i_scaled, chebyshev_exp_coefficients, chebyshev_heat_apply};
pub use cg::{conjugate_gradient, CgOutcome};
pub use dft::{dft_forward, dft_inverse};
pub use eigen::{herm_eigen_small, sym_eigen, SymEigen};
pub use power::{extreme_eigen_bounds, sigma_max_small};
pub use qr::{banded_nullspace, BandedRows};
