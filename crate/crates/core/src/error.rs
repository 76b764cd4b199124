use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("regularization parameter must be positive, got {0}")]
    InvalidRegularization(f64),

    #[error("kernel matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPsdGram { min_eigenvalue: f64 },

    #[error("response {index} is not finite")]
    NonFiniteResponse { index: usize },

    #[error("periodic spectrum is not positive semi-definite: eigenvalue {value:e} at frequency {frequency:?}")]
    NonPsdSpectrum { value: f64, frequency: Vec<i64> },

    #[error("composite Simpson rule needs an even, positive panel count, got {0}")]
    OddPanels(usize),

    #[error("target has no eigensystem attached")]
    MissingEigensystem,

    #[error("need at least {required} positive eigenvalues in the index range, found {found}")]
    TooFewIndices { required: usize, found: usize },

    #[error("hypercube packing stopped at {achieved} codewords, {required} required")]
    PackingExhausted { achieved: usize, required: usize },

    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("config: {0}")]
    Config(String),

    #[error("non-positive mean error {value:e} at n = {n}")]
    NonPositiveError { n: usize, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable code recorded in result tables when a row fails.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidRegularization(_) => "invalid_nu",
            Error::NonPsdGram { .. } => "non_psd",
            Error::NonFiniteResponse { .. } => "non_finite_y",
            Error::NonPsdSpectrum { .. } => "non_psd_spectrum",
            Error::OddPanels(_) => "odd_panels",
            Error::MissingEigensystem => "missing_eigensystem",
            Error::TooFewIndices { .. } => "too_few_indices",
            Error::PackingExhausted { .. } => "packing_exhausted",
            Error::Decomposition(_) => "decomposition",
            Error::Solve(_) => "solve",
            Error::Config(_) => "config",
            Error::NonPositiveError { .. } => "non_positive_error",
            Error::Io(_) => "io",
        }
    }
}
