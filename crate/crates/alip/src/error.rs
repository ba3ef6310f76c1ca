use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlipError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("footstep action outside reach box: ({px:.3}, {py:.3}, {pz:.3})")]
    OutsideReachBox { px: f64, py: f64, pz: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
