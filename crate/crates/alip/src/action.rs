use serde::{Deserialize, Serialize};

/// Which foot is currently in the air.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwingSide {
    Left,
    Right,
}

impl SwingSide {
    pub fn opposite(&self) -> Self {
        match self {
            SwingSide::Left => SwingSide::Right,
            SwingSide::Right => SwingSide::Left,
        }
    }

    /// Sign of the lateral (+y = left) half-plane this foot lands in.
    pub fn lateral_sign(&self) -> f64 {
        match self {
            SwingSide::Left => 1.0,
            SwingSide::Right => -1.0,
        }
    }
}

/// Swing-foot touchdown target in the local stance frame, plus the gait
/// phase at which it was issued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FootstepAction {
    pub p_x: f64,
    pub p_y: f64,
    /// Touchdown height relative to the current stance plane [m].
    pub p_z: f64,
    /// Fraction of the current step elapsed when issued, in [0,1].
    pub phase: f64,
}

impl FootstepAction {
    pub fn new(p_x: f64, p_y: f64, p_z: f64, phase: f64) -> Self {
        Self { p_x, p_y, p_z, phase }
    }

    pub fn is_finite(&self) -> bool {
        self.p_x.is_finite() && self.p_y.is_finite() && self.p_z.is_finite()
    }

    /// Lateral reflection of the action (p_y negated).
    pub fn mirrored(&self) -> Self {
        Self {
            p_y: -self.p_y,
            ..*self
        }
    }
}

/// Kinematic limits on footstep targets. `p_y` must land on the swing
/// foot's side of the stance foot with magnitude in [y_min, y_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReachBox {
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z_max: f64,
}

impl Default for ReachBox {
    fn default() -> Self {
        Self {
            x_max: 0.6,
            y_min: 0.05,
            y_max: 0.5,
            z_max: 0.25,
        }
    }
}

impl ReachBox {
    pub fn contains(&self, action: &FootstepAction, side: SwingSide) -> bool {
        let sy = side.lateral_sign();
        action.is_finite()
            && action.p_x.abs() <= self.x_max
            && action.p_y * sy >= self.y_min
            && action.p_y * sy <= self.y_max
            && action.p_z.abs() <= self.z_max
    }

    /// Clamp the action into the box; second value reports whether any
    /// component moved.
    pub fn clamp(&self, action: &FootstepAction, side: SwingSide) -> (FootstepAction, bool) {
        let sy = side.lateral_sign();
        let clamped = FootstepAction {
            p_x: action.p_x.clamp(-self.x_max, self.x_max),
            p_y: sy * (action.p_y * sy).clamp(self.y_min, self.y_max),
            p_z: action.p_z.clamp(-self.z_max, self.z_max),
            phase: action.phase,
        };
        let moved = clamped.p_x != action.p_x
            || clamped.p_y != action.p_y
            || clamped.p_z != action.p_z;
        (clamped, moved)
    }

    /// Clamp only the horizontal offsets (used by planners that leave p_z
    /// to a later terrain snap).
    pub fn clamp_xy(&self, u_x: f64, u_y: f64, side: SwingSide) -> (f64, f64, bool) {
        let sy = side.lateral_sign();
        let cx = u_x.clamp(-self.x_max, self.x_max);
        let cy = sy * (u_y * sy).clamp(self.y_min, self.y_max);
        (cx, cy, cx != u_x || cy != u_y)
    }
}
