//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building graphs, windows, or running
/// the numerical routines.
#[derive(Debug, Error)]
pub enum LapnetError {
    /// A graph constructor was given parameters that violate the edge axioms
    /// (positive conductances, no self-loops, symmetric adjacency).
    #[error("graph construction: {0}")]
    Graph(String),

    /// A graph file could not be read or parsed, or declares an unsupported
    /// format tag.
    #[error("graph file: {0}")]
    GraphFile(String),

    /// A window is empty, out of range for the index space, or of the wrong
    /// shape for the graph it is applied to.
    #[error("window: {0}")]
    Window(String),

    /// A vertex passed to an operation does not belong to the graph or to the
    /// materialized window.
    #[error("vertex {0} is not in the domain of this operation")]
    UnknownVertex(String),

    /// An iterative solver stopped without meeting its residual target.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    /// An operation that needs a real symmetric matrix was handed something
    /// else (complex entries or an asymmetric band).
    #[error("matrix is not real symmetric: {0}")]
    NotSymmetric(String),

    /// A semigroup routine was handed a matrix with a negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue {0:.6e}")]
    NotPsd(f64),

    /// A numeric argument is outside the domain of the requested operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A half-line probe at shift -1 reported square-summable candidates for
    /// an operator that is provably essentially self-adjoint; this indicates
    /// a broken probe configuration, not a property of the operator.
    #[error(
        "self-adjointness certificate violated: probe at shift -1 counted {count} \
         square-summable solution(s) for a limit-point chain"
    )]
    Certificate { count: usize },

    /// An internal invariant failed; indicates a bug in this crate.
    #[error("internal consistency: {0}")]
    Internal(String),

    /// An I/O failure surfaced by file readers/writers.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LapnetError>;
