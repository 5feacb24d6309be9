use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gram matrix is singular or ill-conditioned (condition number {condition:e})")]
    SingularGram { condition: f64 },

    #[error("secant rejection rate {rate:.4} exceeds the allowed maximum; the model collapses to a point")]
    RejectionRate { rate: f64 },

    #[error("no frequency count up to {d_max} reaches eps_star = {eps_star}; residual at d_max is {residual}")]
    NotFound {
        d_max: usize,
        eps_star: f64,
        residual: f64,
    },

    #[error("tail fit failed: {0}")]
    FitFailure(String),

    #[error("sampler is not centered: mean {mean} with standard error {std_error}")]
    NotCentered { mean: f64, std_error: f64 },

    #[error("analytic mu-norm is not available for {0}")]
    UnsupportedAnalytic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
