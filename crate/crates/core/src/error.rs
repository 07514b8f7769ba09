use thiserror::Error;

pub type Result<T> = std::result::Result<T, GsaError>;

#[derive(Debug, Error)]
pub enum GsaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{op} is not available for the {family} family")]
    UnsupportedFamily {
        family: &'static str,
        op: &'static str,
    },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid of {cells} cells does not fit {samples} samples")]
    GridTooLarge { cells: usize, samples: usize },

    #[error("output CRE is zero; the model output is constant")]
    DegenerateOutput,

    #[error("pair indices must differ (got {0} twice)")]
    SameIndex(usize),

    #[error("input index {index} out of range for {arity} inputs")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("method `{method}` failed: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<GsaError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GsaError {
    pub(crate) fn in_method(self, method: &str) -> Self {
        GsaError::Method {
            method: method.to_string(),
            source: Box::new(self),
        }
    }
}
