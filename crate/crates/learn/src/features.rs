//! Observation → network feature extraction.
//!
//! The two offset-ramp channels of the encoded map are geometric constants,
//! so only the elevation channel is stored per sample; the ramp channels
//! enter the encoder through its cached constant contribution.

use strider_elevmap::{EncodedObservationMap, LocalGrid, GRID_SIZE};
use strider_env::{Observation, PrivilegedObservation};

pub const MAP_CELLS: usize = GRID_SIZE * GRID_SIZE;
/// [vx_des, vy_des, x_com, y_com, l_x, l_y, phase, side, pa_x, pa_y, pa_z]
pub const VEC_DIM: usize = 11;
/// VEC_DIM + 8 plant states.
pub const PRIV_VEC_DIM: usize = VEC_DIM + 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ObsFeatures {
    pub elevation: Vec<f64>,
    pub vec: [f64; VEC_DIM],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivFeatures {
    pub elevation: Vec<f64>,
    pub true_map: Vec<f64>,
    pub vec: [f64; PRIV_VEC_DIM],
}

pub fn obs_features(o: &Observation) -> ObsFeatures {
    ObsFeatures {
        elevation: o.map.elevation.clone(),
        vec: vec_features(o),
    }
}

fn vec_features(o: &Observation) -> [f64; VEC_DIM] {
    [
        o.v_des.0,
        o.v_des.1,
        o.alip.x_com,
        o.alip.y_com,
        o.alip.l_x,
        o.alip.l_y,
        o.phase,
        o.swing_side.lateral_sign(),
        o.prev_action[0],
        o.prev_action[1],
        o.prev_action[2],
    ]
}

pub fn privileged_features(p: &PrivilegedObservation) -> PrivFeatures {
    let base = vec_features(&p.obs);
    let mut vec = [0.0; PRIV_VEC_DIM];
    vec[..VEC_DIM].copy_from_slice(&base);
    vec[VEC_DIM..].copy_from_slice(&p.plant_state);
    PrivFeatures {
        elevation: p.obs.map.elevation.clone(),
        true_map: p.true_map.clone(),
        vec,
    }
}

/// Feature-level lateral mirror: flip the map along iy and negate the
/// lateral vector components (vy_des, y_com, l_x, side, pa_y).
pub fn mirror_features(f: &ObsFeatures) -> ObsFeatures {
    let mut elevation = f.elevation.clone();
    flip_map_y(&mut elevation);
    let mut vec = f.vec;
    for idx in [1, 3, 4, 7, 9] {
        vec[idx] = -vec[idx];
    }
    ObsFeatures { elevation, vec }
}

pub(crate) fn flip_map_y(map: &mut [f64]) {
    debug_assert_eq!(map.len(), MAP_CELLS);
    for iy in 0..GRID_SIZE / 2 {
        for ix in 0..GRID_SIZE {
            map.swap(
                LocalGrid::idx(ix, iy),
                LocalGrid::idx(ix, GRID_SIZE - 1 - iy),
            );
        }
    }
}

/// The constant ramp channels, patch-flattened for the encoder cache:
/// row = patch index, columns = [grid_x patch | grid_y patch].
pub fn ramp_patch_constants(resolution: f64, patch: usize) -> ndarray::Array2<f64> {
    let (gx, gy) = EncodedObservationMap::ramps(resolution);
    let per_side = GRID_SIZE / patch;
    let patch_len = patch * patch;
    let mut out = ndarray::Array2::zeros((per_side * per_side, 2 * patch_len));
    for p in 0..per_side * per_side {
        let (py, px) = (p / per_side, p % per_side);
        for k in 0..patch_len {
            let (ky, kx) = (k / patch, k % patch);
            let idx = LocalGrid::idx(px * patch + kx, py * patch + ky);
            out[(p, k)] = gx[idx];
            out[(p, patch_len + k)] = gy[idx];
        }
    }
    out
}

/// Patch-flatten one map channel: (patches, patch_len) blocks row-major.
pub fn patchify(map: &[f64], patch: usize, out: &mut Vec<f64>) {
    let per_side = GRID_SIZE / patch;
    for p in 0..per_side * per_side {
        let (py, px) = (p / per_side, p % per_side);
        for k in 0..patch * patch {
            let (ky, kx) = (k / patch, k % patch);
            out.push(map[LocalGrid::idx(px * patch + kx, py * patch + ky)]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_features_is_involution() {
        let mut f = ObsFeatures {
            elevation: (0..MAP_CELLS).map(|i| i as f64 * 0.001).collect(),
            vec: [0.4, -0.2, 0.05, 0.1, -0.3, 0.2, 0.5, 1.0, 0.1, 0.2, -0.1],
        };
        f.elevation[LocalGrid::idx(3, 60)] = 9.0;
        let mm = mirror_features(&mirror_features(&f));
        assert_eq!(mm, f);
    }

    #[test]
    fn patchify_covers_every_cell_once() {
        let map: Vec<f64> = (0..MAP_CELLS).map(|i| i as f64).collect();
        let mut out = Vec::new();
        patchify(&map, 8, &mut out);
        assert_eq!(out.len(), MAP_CELLS);
        let mut sorted = out.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, v) in sorted.iter().enumerate() {
            assert_eq!(*v, i as f64);
        }
    }
}
