use thiserror::Error;

/// Coarse grouping of errors, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Arity,
    Unsupported,
    Numeric,
    Precondition,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected a {expected}-qubit operator, got {got} qubits")]
    WrongArity { expected: usize, got: usize },
    #[error("interaction on {got} qubits exceeds the supported maximum of {max}")]
    ArityTooLarge { got: usize, max: usize },
    #[error("matrix is not special orthogonal (deviation {0:e})")]
    NotSpecialOrthogonal(f64),
    #[error("correlation data is not swap-symmetric")]
    NotSymmetric,
    #[error("correlation data is not swap-antisymmetric")]
    NotAntisymmetric,
    #[error("element {index} has Pauli rank {rank}, at most 1 allowed")]
    RankTooHigh { index: usize, rank: usize },
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
    #[error("instance failed validation: {0}")]
    ValidationFailed(String),
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("cutoff {cutoff} lies inside an eigenvalue cluster (gap {gap:e} below guard {guard:e})")]
    CutoffInsideCluster { cutoff: f64, gap: f64, guard: f64 },
    #[error("resolvent is singular at the requested point")]
    ResolventSingular,
    #[error("heavy term is not gap normalized: {0}")]
    NotGapNormalized(String),
    #[error("unsupported logical term: {0}")]
    UnsupportedLogicalTerm(String),
    #[error("alpha = {0} is degenerate for this reduction")]
    DegenerateAlpha(f64),
    #[error("alpha and beta are both zero")]
    BothZero,
    #[error("gadget precondition failed: {0}")]
    VariantPreconditionFailed(String),
    #[error("symmetry precondition failed: {0}")]
    SymmetryPreconditionFailed(String),
    #[error("2-local part is not proportional to ZZ: {0}")]
    NotZZForm(String),
    #[error("diagonal interaction has no unique extremal entry")]
    NoUniqueExtremum,
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Parse { .. } | ValidationFailed(_) => ErrorKind::Parse,
            WrongArity { .. } | ArityTooLarge { .. } | DimensionMismatch { .. } => ErrorKind::Arity,
            UnsupportedLogicalTerm(_) => ErrorKind::Unsupported,
            NonHermitian(_) | NoConvergence { .. } | CutoffInsideCluster { .. } | ResolventSingular => {
                ErrorKind::Numeric
            }
            Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Precondition,
        }
    }

    pub fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { context: context.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
