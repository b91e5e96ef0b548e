use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("particles {i} and {j} collide: |x_i - x_j| = {distance:e}")]
    PositionCollision { i: usize, j: usize, distance: f64 },

    #[error("matrices do not form a Calogero-Moser pair: {0}")]
    NotCmPair(String),

    #[error("degenerate spectrum: min gap {min_gap:e} below threshold {threshold:e}")]
    DegenerateSpectrum { min_gap: f64, threshold: f64 },

    #[error("eigenvector {index} has e^T psi = 0 to working precision")]
    NormalizationFailure { index: usize },

    #[error("identity check failed ({what}): residual {residual:e}")]
    IdentityViolation { what: String, residual: f64 },

    #[error("observable `{name}` failed to evaluate: {reason}")]
    EvalFailure { name: String, reason: String },

    #[error("(I, J) chart is singular: condition number {condition:e}")]
    SingularChart { condition: f64 },

    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("coupling `{0}` is not supported by the dynamics module")]
    CouplingUnsupported(String),

    #[error("collision detected during integration at t = {t}: min separation {separation:e}")]
    CollisionDetected { t: f64, separation: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("ambiguous branch matching at sample {sample}")]
    BranchAmbiguity { sample: usize },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable upper-case identifier of the variant, used in CLI messages.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PositionCollision { .. } => "POSITION_COLLISION",
            Error::NotCmPair(_) => "NOT_CM_PAIR",
            Error::DegenerateSpectrum { .. } => "DEGENERATE",
            Error::NormalizationFailure { .. } => "NORMALIZATION_FAILURE",
            Error::IdentityViolation { .. } => "IDENTITY_VIOLATION",
            Error::EvalFailure { .. } => "EVAL_FAILURE",
            Error::SingularChart { .. } => "SINGULAR_CHART",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::CouplingUnsupported(_) => "COUPLING_UNSUPPORTED",
            Error::CollisionDetected { .. } => "COLLISION_DETECTED",
            Error::StepUnderflow { .. } => "STEP_UNDERFLOW",
            Error::BranchAmbiguity { .. } => "BRANCH_AMBIGUITY",
            Error::NoConvergence(_) => "NO_CONVERGENCE",
            Error::Precondition(_) => "PRECONDITION",
            Error::InvalidInput(_) => "INVALID_INPUT",
        }
    }

    pub(crate) fn eval(name: impl Into<String>, reason: impl std::fmt::Display) -> Self {
        Error::EvalFailure {
            name: name.into(),
            reason: reason.to_string(),
        }
    }
}
