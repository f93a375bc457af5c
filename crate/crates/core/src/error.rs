use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator dimension must be positive")]
    ZeroDimension,

    #[error("scale factor must be a finite nonnegative number, got {0}")]
    NegativeScale(f64),

    #[error("direct sum needs at least one part")]
    EmptyDirectSum,

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("vector has {got} coordinates but the operator acts on dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("the resolvent is undefined at λ = 0")]
    ZeroLambda,

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("power iteration did not converge in {iterations} iterations (last log-norm {last_log_norm})")]
    NonConvergence { iterations: usize, last_log_norm: f64 },

    #[error("at |λ| = {modulus:e}, θ = {theta}: {source}")]
    AtLambda {
        modulus: f64,
        theta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("degenerate regression: the resolvent log-norms in the tail are all equal")]
    DegenerateRegression,

    #[error("set is empty")]
    EmptySet,

    #[error("set is not right closed: {0}")]
    NotRightClosed(String),

    #[error("set must contain 1: the direct-sum construction needs a summand with rate 1")]
    MissingOne,

    #[error("operation not supported for this operator: {0}")]
    Unsupported(String),

    #[error("no candidate exponent produced enough witnesses")]
    NoWitness,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_lambda(self, modulus: f64, theta: f64) -> Self {
        Error::AtLambda {
            modulus,
            theta,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping λ tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLambda { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root(),
            Error::NonConvergence { .. }
                | Error::TooFewSamples { .. }
                | Error::DegenerateRegression
                | Error::NoWitness
        )
    }
}
