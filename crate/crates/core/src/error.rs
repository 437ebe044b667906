use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Step of the simultaneous congruence reduction that rejected a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimCongStage {
    /// `Ker B` is not annihilated by `A`, so `Im A` is not inside `Im B`.
    ImageContainment,
    /// The compressed block of `A` is not idempotent.
    Idempotency,
    /// The compressed block has eigenvalues away from `{0, 1}`.
    SpectrumClustering,
    /// The final reconstruction of `A` or `B` is off.
    Reconstruction,
}

impl fmt::Display for SimCongStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SimCongStage::ImageContainment => "image-containment",
            SimCongStage::Idempotency => "idempotency",
            SimCongStage::SpectrumClustering => "spectrum-clustering",
            SimCongStage::Reconstruction => "reconstruction",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have at least one row and column")]
    Empty,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },
    #[error("matrix is numerically singular (smallest singular value {sigma_min:e})")]
    SingularMatrix { sigma_min: f64 },
    #[error("pair is not minus-comparable: {stage} check failed (residual {residual:e})")]
    NotMinusComparable { stage: SimCongStage, residual: f64 },
    #[error("index {k} out of range for dimension {n}")]
    OutOfRange { k: usize, n: usize },
    #[error("invalid tolerance `{name}`: must be finite and strictly positive")]
    InvalidTolerance { name: &'static str },
    #[error("inconsistent samples: {0}")]
    InconsistentSamples(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
}
