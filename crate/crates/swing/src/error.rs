use thiserror::Error;

#[derive(Debug, Error)]
pub enum SwingError {
    #[error("planning horizon {0:.4} s below minimum {1:.4} s")]
    HorizonTooShort(f64, f64),

    #[error("time {0:.4} outside the spline interval [{1:.4}, {2:.4}]")]
    OutsideInterval(f64, f64, f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
