use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse polynomial `{0}`")]
    Parse(String),
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("polynomial degree {0} is too small for this operation")]
    DegreeTooSmall(usize),
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial is reducible{}", .factor.as_ref().map(|f| format!(", factor {f}")).unwrap_or_default())]
    Reducible { factor: Option<String> },
    #[error("expected a cubic polynomial")]
    NotCubic,
    #[error("insufficient units: rank {found} of {needed}, raise the coordinate bound")]
    InsufficientUnits { found: usize, needed: usize },
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precision exhausted at {0} bits")]
    PrecisionExhausted(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("element is not integral over the order")]
    NotIntegral,
}

pub type Result<T> = std::result::Result<T, Error>;
