use thiserror::Error;

/// Every failure raised by the library.
///
/// [`QhaError::code`] gives the stable kebab-case identifier used by the
/// command-line front end on its `error: <code>: <message>` line.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QhaError {
    #[error("grid dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("objects belong to different contexts (N={left} vs N={right})")]
    ContextMismatch { left: usize, right: usize },
    #[error("expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not a mixed state: {0}")]
    NotMixedState(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("function vanishes identically")]
    AllZero,
    #[error("spreading function has {zeros} zero(s); the mask is not uniquely determined")]
    ZeroSpreading { zeros: usize },
    #[error("window ambiguity function has {zeros} zero(s); phase retrieval is not unique")]
    ZeroAmbiguity { zeros: usize },
    #[error("lifted operator is not rank one (second/first eigenvalue ratio {ratio:.3e})")]
    NotRankOne { ratio: f64 },
    #[error("kernel function is not real-valued (imaginary part {0:.3e})")]
    ComplexKernel(f64),
    #[error("kernel operator is not Hermitian (defect {0:.3e})")]
    NonHermitianKernel(f64),
    #[error("domains do not form a partition of the grid: {0}")]
    NotAPartition(String),
    #[error("signal must have unit norm, got {0}")]
    NotNormalized(f64),
    #[error("deconvolved mask is not binary (worst deviation {deviation:.3e} at k={k}, l={l})")]
    NonBinaryMask { deviation: f64, k: usize, l: usize },
    #[error("multiwindow filter needs at least one term")]
    EmptyTerms,
    #[error("point list must not be empty")]
    EmptyPoints,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Io(String),
}

impl QhaError {
    pub fn code(&self) -> &'static str {
        match self {
            QhaError::InvalidDimension(_) => "invalid-dimension",
            QhaError::InvalidTolerance(_) => "invalid-tolerance",
            QhaError::ContextMismatch { .. } => "context-mismatch",
            QhaError::ShapeMismatch { .. } => "shape-mismatch",
            QhaError::NotHermitian(_) => "not-hermitian",
            QhaError::NotMixedState(_) => "not-mixed-state",
            QhaError::InvalidExponent(_) => "invalid-exponent",
            QhaError::AllZero => "all-zero",
            QhaError::ZeroSpreading { .. } => "zero-spreading",
            QhaError::ZeroAmbiguity { .. } => "zero-ambiguity",
            QhaError::NotRankOne { .. } => "not-rank-one",
            QhaError::ComplexKernel(_) => "complex-kernel",
            QhaError::NonHermitianKernel(_) => "non-hermitian-kernel",
            QhaError::NotAPartition(_) => "not-a-partition",
            QhaError::NotNormalized(_) => "not-normalized",
            QhaError::NonBinaryMask { .. } => "non-binary-mask",
            QhaError::EmptyTerms => "empty-terms",
            QhaError::EmptyPoints => "empty-points",
            QhaError::UnknownPreset(_) => "unknown-preset",
            QhaError::Format(_) => "format",
            QhaError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for QhaError {
    fn from(err: std::io::Error) -> Self {
        QhaError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QhaError>;
