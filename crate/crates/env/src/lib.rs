//! The reduced step-to-step walking MDP.
//!
//! One tick is 25 ms (40 Hz footstep commands). Inside a tick the surrogate
//! plant runs a 2 kHz inner loop along the swing spline while the ALIP
//! state flows in closed form; at the end of every 0.3 s single-support
//! phase the touchdown reset re-expresses the state about the realized
//! foothold, snapped onto the terrain. Swings that penetrate the terrain
//! deeper than the collision tolerance touch down prematurely where they
//! hit, which is what makes terrain-blind planners fail on stairs.

mod config;
mod curriculum;
mod episode;
mod error;
mod log;
mod observation;
mod reward;
mod termination;

pub use config::{
    DomainRandConfig, EnvConfig, EpisodeConfig, EpisodeInit, RewardCoefficients,
    TerminationConfig, MAX_TICKS_TRAINING, TICK_DT,
};
pub use curriculum::{curriculum, CurriculumPhase};
pub use episode::{Env, StepInfo, StepOutcome, TouchdownInfo};
pub use error::EnvError;
pub use log::{EpisodeLog, EpisodeSummary, LogRow};
pub use observation::{mirror_act, mirror_obs, Observation, PrivilegedObservation};
pub use reward::{reward, RewardBreakdown, RewardContext};
pub use termination::TerminationCause;
