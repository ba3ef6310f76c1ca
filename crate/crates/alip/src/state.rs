use serde::{Deserialize, Serialize};

use crate::params::{AlipParams, ValidityEnvelope};

/// Mass-normalized ALIP state in the local stance frame.
///
/// Positions are CoM offsets from the stance contact; `l_x`/`l_y` are the
/// horizontal components of the angular momentum about the contact divided
/// by the robot mass.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlipState {
    pub x_com: f64,
    pub y_com: f64,
    pub l_x: f64,
    pub l_y: f64,
}

impl AlipState {
    pub fn new(x_com: f64, y_com: f64, l_x: f64, l_y: f64) -> Self {
        Self {
            x_com,
            y_com,
            l_x,
            l_y,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x_com, self.y_com, self.l_x, self.l_y]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// True when every component is finite and inside the envelope.
    pub fn is_valid(&self, env: &ValidityEnvelope) -> bool {
        self.is_finite()
            && self.x_com.abs() <= env.max_offset
            && self.y_com.abs() <= env.max_offset
            && self.l_x.abs() <= env.max_momentum
            && self.l_y.abs() <= env.max_momentum
    }

    /// Horizontal CoM velocity implied by the momentum coordinates:
    /// (l_y/H, −l_x/H).
    pub fn com_velocity(&self, params: &AlipParams) -> (f64, f64) {
        (
            self.l_y / params.com_height,
            -self.l_x / params.com_height,
        )
    }

    /// Lateral reflection: negate the y-position and x-momentum.
    pub fn mirrored(&self) -> Self {
        Self {
            x_com: self.x_com,
            y_com: -self.y_com,
            l_x: -self.l_x,
            l_y: self.l_y,
        }
    }

    /// Conserved quantity of each decoupled 2×2 subsystem along the flow:
    /// g·pos² − l²/H, returned as (sagittal, lateral).
    pub fn orbital_invariants(&self, params: &AlipParams) -> (f64, f64) {
        let g = params.gravity;
        let h = params.com_height;
        (
            g * self.x_com * self.x_com - self.l_y * self.l_y / h,
            g * self.y_com * self.y_com - self.l_x * self.l_x / h,
        )
    }
}
