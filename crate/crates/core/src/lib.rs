//! lapnet: a numerical toolkit for weighted graph Laplacians.
//!
//! The crate covers, for finite graphs and for windowed views of infinite
//! chains and lattices:
//!
//! * graph construction, validation, and a JSON interchange format
//!   ([`graph`]);
//! * the Laplacian as an operator and as a banded matrix, with energy forms
//!   ([`operator`]);
//! * dipole potentials, effective-resistance metrics, and Kirchhoff-law
//!   verification ([`potential`]);
//! * spectra, functions of the Laplacian, fractional Sobolev norms, and
//!   square-summability probes for banded half-line operators ([`spectral`]);
//! * heat semigroups with certified window-truncation error bounds
//!   ([`semigroup`]);
//! * the position/momentum band matrices of one-dimensional quantum
//!   mechanics, which exercise the half-line machinery on operators that are
//!   not graph Laplacians ([`heisenberg`]).
//!
//! All floating point work is in f64.  Every routine is deterministic: no
//! randomized pivoting, no time-based seeds, and fixed reduction orders.

pub mod error;
pub mod graph;
pub mod heisenberg;
pub mod linalg;
pub mod operator;
pub mod potential;
pub mod semigroup;
pub mod spectral;
pub mod util;

pub use error::{LapnetError, Result};
pub use graph::{materialize, GraphSystem, Vertex, Window, WindowedGraph};
pub use heisenberg::{deficiency_probe_banded, DeficiencyPair, HalfLineBandedOperator};
pub use operator::{assemble_matrix, BandedMatrix, BoundaryMode, VertexField};
pub use potential::{resistance_distance, solve_dipole, PotentialSolution, SolverKind};
pub use semigroup::{boundary_coupling, heat_apply, truncation_error_check, TruncationCheck};
pub use spectral::{
    cyclic_spectrum, defect_probe, hs_membership_line, hs_norm, truncated_spectrum, DefectConfig,
    DefectReport, Spectrum,
};
