use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{n} sites exceed the dense limit of {max}")]
    TooManySites { n: usize, max: usize },

    #[error("site {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("site {0} listed more than once")]
    DuplicateSite(usize),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite")]
    NotPositive,

    #[error("invalid mixture weights: {0}")]
    BadWeights(String),

    #[error("state does not satisfy the rebit condition: {0}")]
    NotRebit(String),

    #[error("invalid ring size {n}: {reason}")]
    InvalidRingSize { n: usize, reason: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("link phases differ by up to {spread:.3e} rad; equalize phases first")]
    UnequalLinkPhases { spread: f64 },

    #[error("link ({0},{1}) carries no correlation")]
    BrokenLink(usize, usize),

    #[error("({0},{1}) is not a link of the lattice")]
    NotALink(usize, usize),

    #[error("fully entangled fraction routes disagree: spectral {spectral}, optimizer {optimizer}")]
    MethodDisagreement { spectral: f64, optimizer: f64 },

    #[error("malformed state file: {0}")]
    StateFile(String),
}
