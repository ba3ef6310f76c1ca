use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("no active episode (call reset first)")]
    NoEpisode,

    #[error("episode already terminated")]
    EpisodeOver,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Terrain(#[from] strider_terrain::TerrainError),

    #[error(transparent)]
    ElevMap(#[from] strider_elevmap::ElevMapError),

    #[error(transparent)]
    Alip(#[from] strider_alip::AlipError),

    #[error(transparent)]
    Swing(#[from] strider_swing::SwingError),
}
