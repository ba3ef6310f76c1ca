use thiserror::Error;

#[derive(Debug, Error)]
pub enum ElevMapError {
    #[error("query error: {0}")]
    Query(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
