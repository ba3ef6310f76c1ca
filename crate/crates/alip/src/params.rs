use serde::{Deserialize, Serialize};

use crate::error::AlipError;

/// Physical parameters of the mass-normalized ALIP model.
///
/// `mass` only matters for mapping external pelvis forces into
/// mass-normalized momentum rates; the unforced dynamics never use it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlipParams {
    /// CoM height above the stance plane [m].
    pub com_height: f64,
    /// Gravity [m/s²].
    pub gravity: f64,
    /// Single-support duration [s].
    pub step_duration: f64,
    /// Nominal lateral spacing between feet [m].
    pub stance_width: f64,
    /// Robot mass [kg].
    pub mass: f64,
}

impl Default for AlipParams {
    fn default() -> Self {
        Self {
            com_height: 0.85,
            gravity: 9.81,
            step_duration: 0.3,
            stance_width: 0.20,
            mass: 32.0,
        }
    }
}

impl AlipParams {
    pub fn validate(&self) -> Result<(), AlipError> {
        let checks = [
            (self.com_height, "com_height"),
            (self.gravity, "gravity"),
            (self.step_duration, "step_duration"),
            (self.stance_width, "stance_width"),
            (self.mass, "mass"),
        ];
        for (v, name) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(AlipError::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Pendulum frequency ω = sqrt(g/H) [rad/s].
    pub fn omega(&self) -> f64 {
        (self.gravity / self.com_height).sqrt()
    }
}

/// Magnitude bounds outside which an ALIP state is flagged invalid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidityEnvelope {
    /// Bound on |x_com| and |y_com| [m].
    pub max_offset: f64,
    /// Bound on |l_x| and |l_y| [m²/s].
    pub max_momentum: f64,
}

impl Default for ValidityEnvelope {
    fn default() -> Self {
        Self {
            max_offset: 1.0,
            max_momentum: 5.0,
        }
    }
}
