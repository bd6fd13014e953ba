use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite function value at a stencil sample")]
    NonFiniteEvaluation,
    #[error("finite-difference step {0:e} is below 1e-9")]
    StepUnderflow(f64),
    #[error("invalid difference scheme: {0}")]
    InvalidScheme(String),
    #[error("singular frame: |det| = {0:e}")]
    SingularFrame(f64),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("point outside the chart domain of {model}: {reason}")]
    OutOfDomain { model: String, reason: String },
    #[error("unknown model `{0}` (expected abelian(n), heisenberg3 or affine1)")]
    UnknownModel(String),
    #[error("not pseudo-convex: minimum Hessian eigenvalue {0:e}")]
    NotPseudoConvex(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("fiber vector too close to the zero section: |w|_inf = {norm:e} < {min:e}")]
    DegenerateFiber { norm: f64, min: f64 },
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("invalid structure constants: {0}")]
    InvalidStructureConstants(String),
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}
