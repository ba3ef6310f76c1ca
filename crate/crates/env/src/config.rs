use serde::{Deserialize, Serialize};

use strider_alip::{AlipParams, LqrWeights, ReachBox, SwingSide, ValidityEnvelope};
use strider_elevmap::MapNoiseConfig;
use strider_swing::{PlantGains, SplineWeights};
use strider_terrain::TerrainSpec;

use crate::error::EnvError;

/// Footstep-command period [s]; 40 Hz.
pub const TICK_DT: f64 = 0.025;
/// Training episode cap: 400 ticks = 10 s.
pub const MAX_TICKS_TRAINING: usize = 400;

/// Reward and penalty coefficients. Defaults reproduce the published
/// reward table exactly; the torque proxy additionally carries a scale
/// mapping surrogate command accelerations onto a torque-like magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardCoefficients {
    pub w_vx: f64,
    pub k_vx: f64,
    pub w_vy: f64,
    pub k_vy: f64,
    pub w_z: f64,
    pub k_z: f64,
    pub w_phi: f64,
    pub k_phi: f64,
    pub w_smooth: f64,
    pub k_smooth: f64,
    pub w_reg: f64,
    pub k_reg: f64,
    pub track_gain: f64,
    pub track_margin: f64,
    pub torque: f64,
    /// Multiplier mapping surrogate commands to the torque proxy:
    /// p_τ = torque · Σ (torque_scale·cmd)².
    pub torque_scale: f64,
    pub edge: f64,
    pub collision: f64,
}

impl Default for RewardCoefficients {
    fn default() -> Self {
        Self {
            w_vx: 0.5,
            k_vx: 2.0,
            w_vy: 0.25,
            k_vy: 2.0,
            w_z: 0.3125,
            k_z: 4.0,
            w_phi: 0.1875,
            k_phi: 2.0,
            w_smooth: 0.125,
            k_smooth: 3.0,
            w_reg: 0.125,
            k_reg: 2.0,
            track_gain: 3.5,
            track_margin: 0.05,
            torque: 7.0e-6,
            torque_scale: 6.0,
            edge: 1.5,
            collision: 1.5,
        }
    }
}

impl RewardCoefficients {
    /// Sum of the reward-side coefficients (the zero-error total).
    pub fn reward_sum(&self) -> f64 {
        self.w_vx + self.w_vy + self.w_z + self.w_phi + self.w_smooth + self.w_reg
    }
}

/// Termination thresholds for the reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerminationConfig {
    /// Horizontal CoM-to-stance distance treated as a fall [m].
    pub capture_radius: f64,
    /// |CoM height − (plane + H)| treated as a fall [m].
    pub com_height_error: f64,
    /// Normalized swing tracking error bound.
    pub tracking_error: f64,
    /// Swing-sweep penetration depth that counts as a hard collision [m].
    pub collision_penetration: f64,
    /// Ticks after a hard collision within which a fall marks the
    /// collision "failing" (2 s).
    pub collision_fail_window: usize,
    /// Stance-height gain needed to count a new riser [m].
    pub riser_count_threshold: f64,
}

impl Default for TerminationConfig {
    fn default() -> Self {
        Self {
            capture_radius: 0.6,
            com_height_error: 0.3,
            tracking_error: 0.5,
            collision_penetration: 0.02,
            collision_fail_window: 80,
            riser_count_threshold: 0.03,
        }
    }
}

/// Domain-randomization ranges (table defaults). Per-episode toggling
/// lives in [`EpisodeConfig::dr_enabled`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainRandConfig {
    pub map: MapNoiseConfig,
    /// Additive uniform noise on each ALIP observation component.
    pub alip_noise: f64,
    /// Maximum action delay [s]; quantized to whole ticks.
    pub delay_max: f64,
    /// Pelvis force ranges [N].
    pub force_xy: f64,
    pub force_z: f64,
}

impl Default for DomainRandConfig {
    fn default() -> Self {
        Self {
            map: MapNoiseConfig::default(),
            alip_noise: 0.03,
            delay_max: 0.025,
            force_xy: 20.0,
            force_z: 10.0,
        }
    }
}

/// Static environment configuration shared by all episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub alip: AlipParams,
    pub envelope: ValidityEnvelope,
    pub reach: ReachBox,
    pub lqr: LqrWeights,
    pub spline: SplineWeights,
    pub plant: PlantGains,
    pub reward: RewardCoefficients,
    pub termination: TerminationConfig,
    pub domain_rand: DomainRandConfig,
    /// Sobel response above which a cell is an edge [m].
    pub edge_threshold: f64,
    /// Median filter window (odd).
    pub median_window: usize,
    /// Commanded-velocity sampling ranges.
    pub vx_range_flat: (f64, f64),
    pub vx_range_rough: (f64, f64),
    pub vy_range: (f64, f64),
    /// Initial-state perturbation half-widths (positions, momenta).
    pub init_offset_pos: f64,
    pub init_offset_mom: f64,
    /// Yaw-rate proxy from consecutive sagittal step asymmetry; constant
    /// zero when disabled.
    pub yaw_proxy_enabled: bool,
    pub yaw_proxy_scale: f64,
    /// Encode elevations relative to the stance plane.
    pub relative_heights: bool,
    /// Spawn x position of the first stance foot [m].
    pub spawn_x: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            alip: AlipParams::default(),
            envelope: ValidityEnvelope::default(),
            reach: ReachBox::default(),
            lqr: LqrWeights::default(),
            spline: SplineWeights::default(),
            plant: PlantGains::default(),
            reward: RewardCoefficients::default(),
            termination: TerminationConfig::default(),
            domain_rand: DomainRandConfig::default(),
            edge_threshold: 0.04,
            median_window: 3,
            vx_range_flat: (-0.8, 0.8),
            vx_range_rough: (0.0, 0.8),
            vy_range: (-0.4, 0.4),
            init_offset_pos: 0.02,
            init_offset_mom: 0.05,
            yaw_proxy_enabled: true,
            yaw_proxy_scale: 1.0,
            relative_heights: true,
            spawn_x: 1.0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        self.alip.validate().map_err(EnvError::Alip)?;
        self.plant.validate().map_err(EnvError::Swing)?;
        self.domain_rand.map.validate().map_err(EnvError::ElevMap)?;
        if self.median_window % 2 == 0 {
            return Err(EnvError::Config("median window must be odd".into()));
        }
        let ticks_per_step = self.alip.step_duration / TICK_DT;
        if (ticks_per_step - ticks_per_step.round()).abs() > 1e-9 {
            return Err(EnvError::Config(format!(
                "step duration {} must be a whole number of {TICK_DT} s ticks",
                self.alip.step_duration
            )));
        }
        Ok(())
    }

    pub fn ticks_per_step(&self) -> usize {
        (self.alip.step_duration / TICK_DT).round() as usize
    }
}

/// Per-episode configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub terrain: TerrainSpec,
    pub seed: u64,
    pub max_ticks: usize,
    pub dr_enabled: bool,
    /// End the episode on any hard collision (stairs-to-failure protocol).
    #[serde(default)]
    pub terminate_on_hard_collision: bool,
    /// Lateral |y| drift bound, when enforced (stairs-to-failure protocol).
    #[serde(default)]
    pub lateral_limit: Option<f64>,
    /// Skip building map observations (vision-free planners).
    #[serde(default)]
    pub lean_observation: bool,
}

impl EpisodeConfig {
    pub fn new(terrain: TerrainSpec, seed: u64) -> Self {
        Self {
            terrain,
            seed,
            max_ticks: MAX_TICKS_TRAINING,
            dr_enabled: false,
            terminate_on_hard_collision: false,
            lateral_limit: None,
            lean_observation: false,
        }
    }
}

/// Fully pinned initial conditions (reset() samples one; tests construct
/// mirrored pairs directly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeInit {
    pub v_des: (f64, f64),
    /// Initial phase in ticks into the current step.
    pub phase_ticks: usize,
    pub swing_side: SwingSide,
    /// Additive offset on the on-orbit initial state.
    pub state_offset: [f64; 4],
}
