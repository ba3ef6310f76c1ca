//! Gaussian footstep policy and privileged value network.
//!
//! Map encoder: non-overlapping 8×8 patch embedding (a stride-8 conv) with
//! tanh, projected to a small latent; body: two tanh hidden layers over
//! [latent, command, ALIP state, phase, side, previous action]; heads: an
//! action mean squashed per-component into the reach box (the lateral
//! component's sign follows the swing side) and a state-independent,
//! clamped log-std.

use ndarray::{s, Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use strider_alip::ReachBox;
use strider_elevmap::GRID_SIZE;

use crate::features::{patchify, ramp_patch_constants, ObsFeatures, PrivFeatures, PRIV_VEC_DIM, VEC_DIM};
use crate::nn::{tanh_backward, tanh_forward, FlatParams, Linear, PatchLinear};

pub const PATCH: usize = 8;
pub const N_PATCHES: usize = (GRID_SIZE / PATCH) * (GRID_SIZE / PATCH);
pub const PATCH_LEN: usize = PATCH * PATCH;

pub const LOG_STD_MIN: f64 = -4.0;
pub const LOG_STD_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyNetConfig {
    pub patch_channels: usize,
    pub latent: usize,
    pub hidden: usize,
    pub log_std_init: f64,
    pub map_resolution: f64,
    pub reach: ReachBox,
}

impl Default for PolicyNetConfig {
    fn default() -> Self {
        Self {
            patch_channels: 8,
            latent: 32,
            hidden: 128,
            log_std_init: -0.7,
            map_resolution: 0.025,
            reach: ReachBox::default(),
        }
    }
}

/// Prepared forward-ready batch.
pub struct PolicyBatch {
    pub x_patch: Array2<f64>,
    pub vec: Array2<f64>,
    pub n: usize,
}

impl PolicyBatch {
    pub fn from_features<'a, I: IntoIterator<Item = &'a ObsFeatures>>(feats: I) -> Self {
        let feats: Vec<&ObsFeatures> = feats.into_iter().collect();
        let n = feats.len();
        let mut patch_data = Vec::with_capacity(n * N_PATCHES * PATCH_LEN);
        let mut vec_data = Vec::with_capacity(n * VEC_DIM);
        for f in &feats {
            patchify(&f.elevation, PATCH, &mut patch_data);
            vec_data.extend_from_slice(&f.vec);
        }
        Self {
            x_patch: Array2::from_shape_vec((n * N_PATCHES, PATCH_LEN), patch_data).unwrap(),
            vec: Array2::from_shape_vec((n, VEC_DIM), vec_data).unwrap(),
            n,
        }
    }
}

/// Intermediate activations cached for the backward pass.
pub struct PolicyCache {
    x_patch: Array2<f64>,
    a_patch: Array2<f64>,
    flat: Array2<f64>,
    a_latent: Array2<f64>,
    cat: Array2<f64>,
    h1: Array2<f64>,
    h2: Array2<f64>,
    tanh_o: Array2<f64>,
    side: Array1<f64>,
    pub mean: Array2<f64>,
}

/// Gradients of the loss with respect to the network inputs (attribution).
pub struct PolicyInputGrads {
    pub elevation: Array2<f64>,
    pub vec: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct PolicyNet {
    pub cfg: PolicyNetConfig,
    pub patch: PatchLinear,
    pub proj: Linear,
    pub l1: Linear,
    pub l2: Linear,
    pub mean_head: Linear,
    pub log_std: Array1<f64>,
    pub g_log_std: Array1<f64>,
    y_center: f64,
    y_half: f64,
}

impl PolicyNet {
    pub fn new<R: Rng>(cfg: PolicyNetConfig, rng: &mut R) -> Self {
        let const_tail = ramp_patch_constants(cfg.map_resolution, PATCH);
        let patch = PatchLinear::new(
            N_PATCHES,
            PATCH_LEN,
            3,
            1,
            cfg.patch_channels,
            const_tail,
            rng,
        );
        let proj = Linear::new(N_PATCHES * cfg.patch_channels, cfg.latent, rng);
        let l1 = Linear::new(cfg.latent + VEC_DIM, cfg.hidden, rng);
        let l2 = Linear::new(cfg.hidden, cfg.hidden, rng);
        let mean_head = Linear::new(cfg.hidden, 3, rng);
        Self {
            patch,
            proj,
            l1,
            l2,
            mean_head,
            log_std: Array1::from_elem(3, cfg.log_std_init),
            g_log_std: Array1::zeros(3),
            y_center: 0.5 * (cfg.reach.y_min + cfg.reach.y_max),
            y_half: 0.5 * (cfg.reach.y_max - cfg.reach.y_min),
            cfg,
        }
    }

    pub fn clamped_log_std(&self) -> Array1<f64> {
        self.log_std.mapv(|v| v.clamp(LOG_STD_MIN, LOG_STD_MAX))
    }

    /// Forward pass; the mean is squashed into the reach box.
    pub fn forward(&self, batch: &PolicyBatch) -> PolicyCache {
        let n = batch.n;
        let p1 = self.patch.forward_var(&batch.x_patch);
        let a_patch = tanh_forward(&p1);
        let flat = a_patch
            .clone()
            .into_shape_with_order((n, N_PATCHES * self.cfg.patch_channels))
            .unwrap();
        let z = self.proj.forward(&flat);
        let a_latent = tanh_forward(&z);
        let mut cat = Array2::zeros((n, self.cfg.latent + VEC_DIM));
        cat.slice_mut(s![.., ..self.cfg.latent]).assign(&a_latent);
        cat.slice_mut(s![.., self.cfg.latent..]).assign(&batch.vec);
        let h1 = tanh_forward(&self.l1.forward(&cat));
        let h2 = tanh_forward(&self.l2.forward(&h1));
        let o = self.mean_head.forward(&h2);
        let tanh_o = tanh_forward(&o);
        let side = batch.vec.column(7).to_owned();
        let mut mean = Array2::zeros((n, 3));
        for i in 0..n {
            mean[(i, 0)] = self.cfg.reach.x_max * tanh_o[(i, 0)];
            mean[(i, 1)] = side[i] * (self.y_center + self.y_half * tanh_o[(i, 1)]);
            mean[(i, 2)] = self.cfg.reach.z_max * tanh_o[(i, 2)];
        }
        PolicyCache {
            x_patch: batch.x_patch.clone(),
            a_patch,
            flat,
            a_latent,
            cat,
            h1,
            h2,
            tanh_o,
            side,
            mean,
        }
    }

    /// Backward pass from gradients on the squashed mean. Accumulates
    /// parameter gradients and returns input gradients.
    pub fn backward(&mut self, cache: &PolicyCache, g_mean: &Array2<f64>) -> PolicyInputGrads {
        let n = cache.mean.nrows();
        let mut g_o = Array2::zeros((n, 3));
        let mut g_vec_extra = Array2::<f64>::zeros((n, VEC_DIM));
        for i in 0..n {
            let d0 = 1.0 - cache.tanh_o[(i, 0)] * cache.tanh_o[(i, 0)];
            let d1 = 1.0 - cache.tanh_o[(i, 1)] * cache.tanh_o[(i, 1)];
            let d2 = 1.0 - cache.tanh_o[(i, 2)] * cache.tanh_o[(i, 2)];
            g_o[(i, 0)] = g_mean[(i, 0)] * self.cfg.reach.x_max * d0;
            g_o[(i, 1)] = g_mean[(i, 1)] * cache.side[i] * self.y_half * d1;
            g_o[(i, 2)] = g_mean[(i, 2)] * self.cfg.reach.z_max * d2;
            // The swing side is itself an input to the squash.
            g_vec_extra[(i, 7)] =
                g_mean[(i, 1)] * (self.y_center + self.y_half * cache.tanh_o[(i, 1)]);
        }
        let g_h2 = tanh_backward(&cache.h2, &self.mean_head.backward(&cache.h2, &g_o));
        let g_h1 = tanh_backward(&cache.h1, &self.l2.backward(&cache.h1, &g_h2));
        let g_cat = self.l1.backward(&cache.cat, &g_h1);
        let g_alat = g_cat.slice(s![.., ..self.cfg.latent]).to_owned();
        let mut g_vec = g_cat.slice(s![.., self.cfg.latent..]).to_owned();
        g_vec += &g_vec_extra;
        let g_z = tanh_backward(&cache.a_latent, &g_alat);
        let g_flat = self.proj.backward(&cache.flat, &g_z);
        let g_ap = g_flat
            .into_shape_with_order((n * N_PATCHES, self.cfg.patch_channels))
            .unwrap();
        let g_p1 = tanh_backward(&cache.a_patch, &g_ap);
        let g_xpatch = self.patch.backward_var(&cache.x_patch, &g_p1);
        let elevation = unpatchify_grads(&g_xpatch, n);
        PolicyInputGrads {
            elevation,
            vec: g_vec,
        }
    }

    /// Full-channel forward for attribution: every map channel is an
    /// explicit input. `channels` rows are per-sample [elev, gx, gy]
    /// flattened maps. Returns (mean, input gradient closure data).
    pub fn forward_full_channels(
        &self,
        elev: &[f64],
        gx: &[f64],
        gy: &[f64],
        vec: &[f64; VEC_DIM],
    ) -> (Array2<f64>, FullChannelCache) {
        let mut patch_data = Vec::with_capacity(N_PATCHES * 3 * PATCH_LEN);
        let mut e_p = Vec::new();
        let mut x_p = Vec::new();
        let mut y_p = Vec::new();
        patchify(elev, PATCH, &mut e_p);
        patchify(gx, PATCH, &mut x_p);
        patchify(gy, PATCH, &mut y_p);
        for p in 0..N_PATCHES {
            patch_data.extend_from_slice(&e_p[p * PATCH_LEN..(p + 1) * PATCH_LEN]);
            patch_data.extend_from_slice(&x_p[p * PATCH_LEN..(p + 1) * PATCH_LEN]);
            patch_data.extend_from_slice(&y_p[p * PATCH_LEN..(p + 1) * PATCH_LEN]);
        }
        let x_full = Array2::from_shape_vec((N_PATCHES, 3 * PATCH_LEN), patch_data).unwrap();
        let p1 = self.patch.forward_full(&x_full);
        let a_patch = tanh_forward(&p1);
        let flat = a_patch
            .clone()
            .into_shape_with_order((1, N_PATCHES * self.cfg.patch_channels))
            .unwrap();
        let z = self.proj.forward(&flat);
        let a_latent = tanh_forward(&z);
        let mut cat = Array2::zeros((1, self.cfg.latent + VEC_DIM));
        cat.slice_mut(s![.., ..self.cfg.latent]).assign(&a_latent);
        for (k, v) in vec.iter().enumerate() {
            cat[(0, self.cfg.latent + k)] = *v;
        }
        let h1 = tanh_forward(&self.l1.forward(&cat));
        let h2 = tanh_forward(&self.l2.forward(&h1));
        let o = self.mean_head.forward(&h2);
        let tanh_o = tanh_forward(&o);
        let side = vec[7];
        let mut mean = Array2::zeros((1, 3));
        mean[(0, 0)] = self.cfg.reach.x_max * tanh_o[(0, 0)];
        mean[(0, 1)] = side * (self.y_center + self.y_half * tanh_o[(0, 1)]);
        mean[(0, 2)] = self.cfg.reach.z_max * tanh_o[(0, 2)];
        (
            mean.clone(),
            FullChannelCache {
                a_patch,
                flat,
                a_latent,
                cat,
                h1,
                h2,
                tanh_o,
                side,
                mean,
            },
        )
    }

    /// Input gradients for the full-channel path (no parameter grads).
    /// Returns per-channel map gradients and the vec gradient.
    pub fn input_grads_full(
        &self,
        cache: &FullChannelCache,
        g_mean: &Array2<f64>,
    ) -> ([Vec<f64>; 3], [f64; VEC_DIM]) {
        let mut g_o = Array2::zeros((1, 3));
        let d0 = 1.0 - cache.tanh_o[(0, 0)] * cache.tanh_o[(0, 0)];
        let d1 = 1.0 - cache.tanh_o[(0, 1)] * cache.tanh_o[(0, 1)];
        let d2 = 1.0 - cache.tanh_o[(0, 2)] * cache.tanh_o[(0, 2)];
        g_o[(0, 0)] = g_mean[(0, 0)] * self.cfg.reach.x_max * d0;
        g_o[(0, 1)] = g_mean[(0, 1)] * cache.side * self.y_half * d1;
        g_o[(0, 2)] = g_mean[(0, 2)] * self.cfg.reach.z_max * d2;
        let side_grad = g_mean[(0, 1)] * (self.y_center + self.y_half * cache.tanh_o[(0, 1)]);

        let g_h2 = tanh_backward(&cache.h2, &g_o.dot(&self.mean_head.w));
        let g_h1 = tanh_backward(&cache.h1, &g_h2.dot(&self.l2.w));
        let g_cat = g_h1.dot(&self.l1.w);
        let g_alat = g_cat.slice(s![.., ..self.cfg.latent]).to_owned();
        let mut g_vec = [0.0; VEC_DIM];
        for k in 0..VEC_DIM {
            g_vec[k] = g_cat[(0, self.cfg.latent + k)];
        }
        g_vec[7] += side_grad;
        let g_z = tanh_backward(&cache.a_latent, &g_alat);
        let g_flat = g_z.dot(&self.proj.w);
        let g_ap = g_flat
            .into_shape_with_order((N_PATCHES, self.cfg.patch_channels))
            .unwrap();
        let g_p1 = tanh_backward(&cache.a_patch, &g_ap);
        let g_xfull = self.patch.input_grad_full(&g_p1);
        // Un-patchify per channel.
        let mut maps = [vec![0.0; GRID_SIZE * GRID_SIZE], vec![0.0; GRID_SIZE * GRID_SIZE], vec![0.0; GRID_SIZE * GRID_SIZE]];
        let per_side = GRID_SIZE / PATCH;
        for p in 0..N_PATCHES {
            let (py, px) = (p / per_side, p % per_side);
            for c in 0..3 {
                for k in 0..PATCH_LEN {
                    let (ky, kx) = (k / PATCH, k % PATCH);
                    let idx = strider_elevmap::LocalGrid::idx(px * PATCH + kx, py * PATCH + ky);
                    maps[c][idx] = g_xfull[(p, c * PATCH_LEN + k)];
                }
            }
        }
        (maps, g_vec)
    }

    /// Draw an action (Box–Muller) or return the mean deterministically,
    /// along with the Gaussian log-probability.
    pub fn act<R: Rng>(
        &self,
        features: &ObsFeatures,
        rng: &mut R,
        deterministic: bool,
    ) -> ([f64; 3], f64) {
        let batch = PolicyBatch::from_features([features]);
        let cache = self.forward(&batch);
        let mean = [cache.mean[(0, 0)], cache.mean[(0, 1)], cache.mean[(0, 2)]];
        let log_std = self.clamped_log_std();
        if deterministic {
            let logp = crate::ppo::gaussian_log_prob_single(&mean, &log_std, &mean);
            return (mean, logp);
        }
        let mut action = [0.0; 3];
        for k in 0..3 {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let xi = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            action[k] = mean[k] + log_std[k].exp() * xi;
        }
        let logp = crate::ppo::gaussian_log_prob_single(&action, &log_std, &mean);
        (action, logp)
    }
}

pub struct FullChannelCache {
    a_patch: Array2<f64>,
    flat: Array2<f64>,
    a_latent: Array2<f64>,
    cat: Array2<f64>,
    h1: Array2<f64>,
    h2: Array2<f64>,
    tanh_o: Array2<f64>,
    side: f64,
    pub mean: Array2<f64>,
}

fn unpatchify_grads(g_xpatch: &Array2<f64>, n: usize) -> Array2<f64> {
    let per_side = GRID_SIZE / PATCH;
    let mut out = Array2::zeros((n, GRID_SIZE * GRID_SIZE));
    for row in 0..n * N_PATCHES {
        let sample = row / N_PATCHES;
        let p = row % N_PATCHES;
        let (py, px) = (p / per_side, p % per_side);
        for k in 0..PATCH_LEN {
            let (ky, kx) = (k / PATCH, k % PATCH);
            let idx = strider_elevmap::LocalGrid::idx(px * PATCH + kx, py * PATCH + ky);
            out[(sample, idx)] = g_xpatch[(row, k)];
        }
    }
    out
}

impl FlatParams for PolicyNet {
    fn param_count(&self) -> usize {
        self.patch.param_count()
            + self.proj.param_count()
            + self.l1.param_count()
            + self.l2.param_count()
            + self.mean_head.param_count()
            + self.log_std.len()
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        self.patch.write_params(out);
        self.proj.write_params(out);
        self.l1.write_params(out);
        self.l2.write_params(out);
        self.mean_head.write_params(out);
        out.extend(self.log_std.iter());
    }

    fn read_params(&mut self, data: &[f64], cursor: &mut usize) {
        self.patch.read_params(data, cursor);
        self.proj.read_params(data, cursor);
        self.l1.read_params(data, cursor);
        self.l2.read_params(data, cursor);
        self.mean_head.read_params(data, cursor);
        for v in self.log_std.iter_mut() {
            *v = data[*cursor];
            *cursor += 1;
        }
    }

    fn write_grads(&self, out: &mut Vec<f64>) {
        self.patch.write_grads(out);
        self.proj.write_grads(out);
        self.l1.write_grads(out);
        self.l2.write_grads(out);
        self.mean_head.write_grads(out);
        out.extend(self.g_log_std.iter());
    }

    fn zero_grads(&mut self) {
        self.patch.zero_grads();
        self.proj.zero_grads();
        self.l1.zero_grads();
        self.l2.zero_grads();
        self.mean_head.zero_grads();
        self.g_log_std.fill(0.0);
    }
}

/// Prepared critic batch.
pub struct ValueBatch {
    pub x_patch: Array2<f64>,
    pub vec: Array2<f64>,
    pub n: usize,
}

impl ValueBatch {
    pub fn from_features<'a, I: IntoIterator<Item = &'a PrivFeatures>>(feats: I) -> Self {
        let feats: Vec<&PrivFeatures> = feats.into_iter().collect();
        let n = feats.len();
        let mut patch_data = Vec::with_capacity(n * N_PATCHES * 2 * PATCH_LEN);
        let mut vec_data = Vec::with_capacity(n * PRIV_VEC_DIM);
        let mut e_p = Vec::new();
        let mut g_p = Vec::new();
        for f in &feats {
            e_p.clear();
            g_p.clear();
            patchify(&f.elevation, PATCH, &mut e_p);
            patchify(&f.true_map, PATCH, &mut g_p);
            for p in 0..N_PATCHES {
                patch_data.extend_from_slice(&e_p[p * PATCH_LEN..(p + 1) * PATCH_LEN]);
                patch_data.extend_from_slice(&g_p[p * PATCH_LEN..(p + 1) * PATCH_LEN]);
            }
            vec_data.extend_from_slice(&f.vec);
        }
        Self {
            x_patch: Array2::from_shape_vec((n * N_PATCHES, 2 * PATCH_LEN), patch_data).unwrap(),
            vec: Array2::from_shape_vec((n, PRIV_VEC_DIM), vec_data).unwrap(),
            n,
        }
    }
}

pub struct ValueCache {
    x_patch: Array2<f64>,
    a_patch: Array2<f64>,
    flat: Array2<f64>,
    a_latent: Array2<f64>,
    cat: Array2<f64>,
    h1: Array2<f64>,
    h2: Array2<f64>,
    pub value: Array1<f64>,
}

/// Privileged critic: same encoder shape over [noisy elevation, true
/// elevation, ramps], body over the extended vector, scalar head. No
/// parameters are shared with the policy.
#[derive(Debug, Clone)]
pub struct ValueNet {
    pub cfg: PolicyNetConfig,
    pub patch: PatchLinear,
    pub proj: Linear,
    pub l1: Linear,
    pub l2: Linear,
    pub head: Linear,
}

impl ValueNet {
    pub fn new<R: Rng>(cfg: PolicyNetConfig, rng: &mut R) -> Self {
        let const_tail = ramp_patch_constants(cfg.map_resolution, PATCH);
        let patch = PatchLinear::new(
            N_PATCHES,
            PATCH_LEN,
            4,
            2,
            cfg.patch_channels,
            const_tail,
            rng,
        );
        let proj = Linear::new(N_PATCHES * cfg.patch_channels, cfg.latent, rng);
        let l1 = Linear::new(cfg.latent + PRIV_VEC_DIM, cfg.hidden, rng);
        let l2 = Linear::new(cfg.hidden, cfg.hidden, rng);
        let head = Linear::new(cfg.hidden, 1, rng);
        Self {
            cfg,
            patch,
            proj,
            l1,
            l2,
            head,
        }
    }

    pub fn forward(&self, batch: &ValueBatch) -> ValueCache {
        let n = batch.n;
        let p1 = self.patch.forward_var(&batch.x_patch);
        let a_patch = tanh_forward(&p1);
        let flat = a_patch
            .clone()
            .into_shape_with_order((n, N_PATCHES * self.cfg.patch_channels))
            .unwrap();
        let z = self.proj.forward(&flat);
        let a_latent = tanh_forward(&z);
        let mut cat = Array2::zeros((n, self.cfg.latent + PRIV_VEC_DIM));
        cat.slice_mut(s![.., ..self.cfg.latent]).assign(&a_latent);
        cat.slice_mut(s![.., self.cfg.latent..]).assign(&batch.vec);
        let h1 = tanh_forward(&self.l1.forward(&cat));
        let h2 = tanh_forward(&self.l2.forward(&h1));
        let v = self.head.forward(&h2);
        ValueCache {
            x_patch: batch.x_patch.clone(),
            a_patch,
            flat,
            a_latent,
            cat,
            h1,
            h2,
            value: v.column(0).to_owned(),
        }
    }

    pub fn backward(&mut self, cache: &ValueCache, g_value: &Array1<f64>) {
        let n = cache.value.len();
        let g_v = g_value.clone().into_shape_with_order((n, 1)).unwrap();
        let g_h2 = tanh_backward(&cache.h2, &self.head.backward(&cache.h2, &g_v));
        let g_h1 = tanh_backward(&cache.h1, &self.l2.backward(&cache.h1, &g_h2));
        let g_cat = self.l1.backward(&cache.cat, &g_h1);
        let g_alat = g_cat.slice(s![.., ..self.cfg.latent]).to_owned();
        let g_z = tanh_backward(&cache.a_latent, &g_alat);
        let g_flat = self.proj.backward(&cache.flat, &g_z);
        let g_ap = g_flat
            .into_shape_with_order((n * N_PATCHES, self.cfg.patch_channels))
            .unwrap();
        let g_p1 = tanh_backward(&cache.a_patch, &g_ap);
        self.patch.backward_var(&cache.x_patch, &g_p1);
    }
}

impl FlatParams for ValueNet {
    fn param_count(&self) -> usize {
        self.patch.param_count()
            + self.proj.param_count()
            + self.l1.param_count()
            + self.l2.param_count()
            + self.head.param_count()
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        self.patch.write_params(out);
        self.proj.write_params(out);
        self.l1.write_params(out);
        self.l2.write_params(out);
        self.head.write_params(out);
    }

    fn read_params(&mut self, data: &[f64], cursor: &mut usize) {
        self.patch.read_params(data, cursor);
        self.proj.read_params(data, cursor);
        self.l1.read_params(data, cursor);
        self.l2.read_params(data, cursor);
        self.head.read_params(data, cursor);
    }

    fn write_grads(&self, out: &mut Vec<f64>) {
        self.patch.write_grads(out);
        self.proj.write_grads(out);
        self.l1.write_grads(out);
        self.l2.write_grads(out);
        self.head.write_grads(out);
    }

    fn zero_grads(&mut self) {
        self.patch.zero_grads();
        self.proj.zero_grads();
        self.l1.zero_grads();
        self.l2.zero_grads();
        self.head.zero_grads();
    }
}
