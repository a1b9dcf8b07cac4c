use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("eigenvalue branch broken at s = {s}: overlap {overlap:.3} below floor")]
    BranchBroken { s: f64, overlap: f64 },
    #[error("fit refused: {0}")]
    FitRefused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
