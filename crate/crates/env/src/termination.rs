use serde::{Deserialize, Serialize};

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationCause {
    /// Reached the tick horizon (success).
    Horizon,
    /// Fall proxy: CoM left the capture region or the height corridor, or
    /// the ALIP state left its validity envelope.
    Fall,
    /// Normalized swing tracking error exceeded the bound.
    Tracking,
    /// Commanded footstep crossed the stance foot's lateral line
    /// (self-collision proxy).
    Crossing,
    /// Hard collision, when the episode protocol terminates on impact.
    HardCollision,
    /// Lateral |y| drift bound exceeded (stairs-to-failure protocol).
    LateralDrift,
}

impl TerminationCause {
    /// Horizon exits are the only successful ones.
    pub fn is_failure(&self) -> bool {
        !matches!(self, TerminationCause::Horizon)
    }
}
