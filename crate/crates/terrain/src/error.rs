use thiserror::Error;

#[derive(Debug, Error)]
pub enum TerrainError {
    #[error("invalid terrain spec: {0}")]
    InvalidSpec(String),

    #[error("query ({x:.3}, {y:.3}) outside map bounds")]
    OutOfBounds { x: f64, y: f64 },

    #[error("malformed heightmap file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
