use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type.
///
/// Variants map onto the failure classes of the solvers: bad arguments,
/// numerical breakdowns (non-convergence, singular systems), structural
/// violations of the matrix/parameter models, and internal cross-check
/// disagreements between two independent computation routes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("eigensolver did not converge: {found} of {total} eigenvalues found")]
    EigNonConvergence {
        found: usize,
        total: usize,
        /// Eigenvalues that did deflate before the iteration budget ran out.
        partial: Vec<Complex64>,
    },

    #[error("not a strict Schur point: |f(0)| = {modulus} (terminal parameter reached)")]
    NotStrictSchur { gamma: Complex64, modulus: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("matrix structure violation: {0}")]
    Structure(String),

    #[error("degenerate measure: {0}")]
    MeasureDegenerate(String),

    #[error("zeros not inside the unit disk: {0}")]
    ZerosNotInDisk(String),

    #[error("extension not found: {0}")]
    ExistenceNotFound(String),

    #[error("capability limit: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;
