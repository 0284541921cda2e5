use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cube outside the grid domain: {0}")]
    Domain(String),
    #[error("cube contains no cell center: {0}")]
    DegenerateCube(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty cube collection")]
    EmptyCollection,
    #[error("duplicate cube in collection: {0}")]
    DuplicateCube(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("singular operator: {0}")]
    SingularOperator(String),
    #[error("non-monotone ball functional near r = {0}")]
    NonMonotone(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
