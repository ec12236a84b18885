use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("need at least 2 training samples, got {0}")]
    TooFewSamples(usize),

    #[error("k = {k} exceeds training size {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("training data contains non-finite values")]
    NonFinite,

    #[error("kernel matrix not positive definite even after ridge escalation")]
    SingularKernel,

    #[error("serialization error: {0}")]
    Serialization(String),
}
