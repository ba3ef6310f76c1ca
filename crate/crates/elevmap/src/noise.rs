use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ElevMapError;
use crate::grid::{LocalGrid, GRID_SIZE};

/// Half-widths of the symmetric elevation-map perturbation ranges. The
/// defaults are the published table values; overrides must not exceed them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapNoiseConfig {
    pub shift_xy_episode: f64,
    pub shift_xy_tick: f64,
    pub shift_z_episode: f64,
    pub shift_z_tick: f64,
    pub uniform_noise: f64,
    pub bias_xyz: f64,
}

impl Default for MapNoiseConfig {
    fn default() -> Self {
        Self {
            shift_xy_episode: 0.03,
            shift_xy_tick: 0.02,
            shift_z_episode: 0.02,
            shift_z_tick: 0.01,
            uniform_noise: 0.02,
            bias_xyz: 0.03,
        }
    }
}

impl MapNoiseConfig {
    pub fn zero() -> Self {
        Self {
            shift_xy_episode: 0.0,
            shift_xy_tick: 0.0,
            shift_z_episode: 0.0,
            shift_z_tick: 0.0,
            uniform_noise: 0.0,
            bias_xyz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ElevMapError> {
        let defaults = Self::default();
        let pairs = [
            (self.shift_xy_episode, defaults.shift_xy_episode, "shift_xy_episode"),
            (self.shift_xy_tick, defaults.shift_xy_tick, "shift_xy_tick"),
            (self.shift_z_episode, defaults.shift_z_episode, "shift_z_episode"),
            (self.shift_z_tick, defaults.shift_z_tick, "shift_z_tick"),
            (self.uniform_noise, defaults.uniform_noise, "uniform_noise"),
            (self.bias_xyz, defaults.bias_xyz, "bias_xyz"),
        ];
        for (v, max, name) in pairs {
            if !(0.0..=max).contains(&v) {
                return Err(ElevMapError::Parameter(format!(
                    "{name} = {v} outside [0, {max}]"
                )));
            }
        }
        Ok(())
    }

    /// Draws held fixed for a whole episode: the per-episode map shift and
    /// the sensor-calibration bias.
    pub fn sample_episode<R: Rng>(&self, rng: &mut R) -> EpisodeMapNoise {
        let u = |rng: &mut R, half: f64| {
            if half == 0.0 {
                0.0
            } else {
                rng.gen_range(-half..=half)
            }
        };
        EpisodeMapNoise {
            shift_x: u(rng, self.shift_xy_episode),
            shift_y: u(rng, self.shift_xy_episode),
            shift_z: u(rng, self.shift_z_episode),
            bias_x: u(rng, self.bias_xyz),
            bias_y: u(rng, self.bias_xyz),
            bias_z: u(rng, self.bias_xyz),
        }
    }
}

/// Per-episode perturbation draws.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpisodeMapNoise {
    pub shift_x: f64,
    pub shift_y: f64,
    pub shift_z: f64,
    pub bias_x: f64,
    pub bias_y: f64,
    pub bias_z: f64,
}

/// Apply the full perturbation stack for one tick: per-episode shift +
/// bias, a freshly sampled per-tick shift, and i.i.d. uniform cell noise.
/// Horizontal shifts are realized as sub-cell resampling with nearest-cell
/// lookup (clamped at the borders).
pub fn perturb<R: Rng>(
    grid: &LocalGrid,
    cfg: &MapNoiseConfig,
    episode: &EpisodeMapNoise,
    rng: &mut R,
) -> LocalGrid {
    let u = |rng: &mut R, half: f64| {
        if half == 0.0 {
            0.0
        } else {
            rng.gen_range(-half..=half)
        }
    };
    let dx = episode.shift_x + episode.bias_x + u(rng, cfg.shift_xy_tick);
    let dy = episode.shift_y + episode.bias_y + u(rng, cfg.shift_xy_tick);
    let dz = episode.shift_z + episode.bias_z + u(rng, cfg.shift_z_tick);

    let mut out = grid.clone();
    let n = GRID_SIZE as i64;
    let cell_dx = (dx / grid.resolution).round() as i64;
    let cell_dy = (dy / grid.resolution).round() as i64;
    if cell_dx != 0 || cell_dy != 0 {
        for iy in 0..n {
            for ix in 0..n {
                // Shifting the map by +d moves features +d: sample the
                // source at p − d.
                let sx = (ix - cell_dx).clamp(0, n - 1) as usize;
                let sy = (iy - cell_dy).clamp(0, n - 1) as usize;
                let idx = LocalGrid::idx(ix as usize, iy as usize);
                out.data[idx] = grid.at(sx, sy);
                out.valid[idx] = grid.is_valid(sx, sy);
            }
        }
    }
    if dz != 0.0 {
        for v in &mut out.data {
            *v += dz;
        }
    }
    if cfg.uniform_noise > 0.0 {
        for v in &mut out.data {
            *v += rng.gen_range(-cfg.uniform_noise..=cfg.uniform_noise);
        }
    }
    out
}
