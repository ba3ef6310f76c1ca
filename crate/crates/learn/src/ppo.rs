//! Clipped-surrogate PPO with value regression, entropy bonus, and the
//! symmetric mirror loss on the action mean.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adam::{clip_grad_norm, Adam};
use crate::error::LearnError;
use crate::features::{mirror_features, ObsFeatures, PrivFeatures};
use crate::nn::FlatParams;
use crate::policy::{PolicyBatch, PolicyNet, ValueBatch, ValueNet, LOG_STD_MAX, LOG_STD_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoConfig {
    pub gamma: f64,
    pub lambda: f64,
    pub clip: f64,
    pub lr: f64,
    pub epochs: usize,
    pub minibatch: usize,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub mirror_weight: f64,
    pub grad_clip: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            lambda: 0.95,
            clip: 0.2,
            lr: 3.0e-4,
            epochs: 4,
            minibatch: 256,
            value_coef: 0.5,
            entropy_coef: 0.01,
            mirror_weight: 2.0,
            grad_clip: 1.0,
        }
    }
}

/// Flattened on-policy rollout data. Advantages are GAE-normalized.
pub struct RolloutBatch {
    pub obs: Vec<ObsFeatures>,
    pub priv_obs: Vec<PrivFeatures>,
    pub actions: Vec<[f64; 3]>,
    pub log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    /// Normalize advantages to zero mean, unit variance (ε-guarded).
    pub fn normalize_advantages(&mut self) {
        let n = self.advantages.len() as f64;
        if n < 2.0 {
            return;
        }
        let mean = self.advantages.iter().sum::<f64>() / n;
        let var = self
            .advantages
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / n;
        let std = var.sqrt().max(1e-8);
        for a in &mut self.advantages {
            *a = (*a - mean) / std;
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PpoLosses {
    pub surrogate: f64,
    pub value: f64,
    pub entropy: f64,
    pub mirror: f64,
    pub grad_norm_policy: f64,
    pub grad_norm_value: f64,
    pub mean_ratio: f64,
}

pub fn gaussian_log_prob_single(action: &[f64; 3], log_std: &Array1<f64>, mean: &[f64; 3]) -> f64 {
    let mut lp = 0.0;
    for k in 0..3 {
        let sigma = log_std[k].exp();
        let z = (action[k] - mean[k]) / sigma;
        lp += -0.5 * z * z - log_std[k] - 0.5 * (2.0 * std::f64::consts::PI).ln();
    }
    lp
}

/// Batch Gaussian log-probability of `actions` under (means, log_std).
pub fn gaussian_log_prob(
    actions: &[[f64; 3]],
    means: &Array2<f64>,
    log_std: &Array1<f64>,
) -> Vec<f64> {
    actions
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mean = [means[(i, 0)], means[(i, 1)], means[(i, 2)]];
            gaussian_log_prob_single(a, log_std, &mean)
        })
        .collect()
}

/// Entropy of the diagonal Gaussian (state-independent).
pub fn gaussian_entropy(log_std: &Array1<f64>) -> f64 {
    log_std
        .iter()
        .map(|ls| ls + 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln())
        .sum()
}

/// Surrogate loss alone for a prepared batch (used by gradient tests).
pub fn surrogate_loss(
    policy: &PolicyNet,
    batch: &PolicyBatch,
    actions: &[[f64; 3]],
    old_log_probs: &[f64],
    advantages: &[f64],
    clip: f64,
) -> f64 {
    let cache = policy.forward(batch);
    let log_std = policy.clamped_log_std();
    let logp = gaussian_log_prob(actions, &cache.mean, &log_std);
    let mut loss = 0.0;
    for i in 0..actions.len() {
        let ratio = (logp[i] - old_log_probs[i]).exp();
        let clipped = ratio.clamp(1.0 - clip, 1.0 + clip);
        loss += -(ratio * advantages[i]).min(clipped * advantages[i]);
    }
    loss / actions.len() as f64
}

/// One PPO update over the batch: `epochs` passes of shuffled minibatches.
#[allow(clippy::too_many_arguments)]
pub fn ppo_update<R: Rng>(
    batch: &RolloutBatch,
    policy: &mut PolicyNet,
    value: &mut ValueNet,
    opt_policy: &mut Adam,
    opt_value: &mut Adam,
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<PpoLosses, LearnError> {
    if batch.is_empty() {
        return Err(LearnError::Shape("empty rollout batch".into()));
    }
    let n = batch.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut totals = PpoLosses::default();
    let mut updates = 0usize;

    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch.max(1)) {
            let mb: Vec<usize> = chunk.to_vec();
            let losses = ppo_minibatch(batch, &mb, policy, value, opt_policy, opt_value, cfg)?;
            totals.surrogate += losses.surrogate;
            totals.value += losses.value;
            totals.entropy += losses.entropy;
            totals.mirror += losses.mirror;
            totals.grad_norm_policy += losses.grad_norm_policy;
            totals.grad_norm_value += losses.grad_norm_value;
            totals.mean_ratio += losses.mean_ratio;
            updates += 1;
        }
    }
    let k = updates.max(1) as f64;
    totals.surrogate /= k;
    totals.value /= k;
    totals.entropy /= k;
    totals.mirror /= k;
    totals.grad_norm_policy /= k;
    totals.grad_norm_value /= k;
    totals.mean_ratio /= k;
    Ok(totals)
}

fn ppo_minibatch(
    batch: &RolloutBatch,
    mb: &[usize],
    policy: &mut PolicyNet,
    value: &mut ValueNet,
    opt_policy: &mut Adam,
    opt_value: &mut Adam,
    cfg: &PpoConfig,
) -> Result<PpoLosses, LearnError> {
    let m = mb.len();
    let obs: Vec<&ObsFeatures> = mb.iter().map(|&i| &batch.obs[i]).collect();
    let mirrored: Vec<ObsFeatures> = obs.iter().map(|f| mirror_features(f)).collect();
    let pb = PolicyBatch::from_features(obs.iter().copied());
    let pb_m = PolicyBatch::from_features(mirrored.iter());
    let priv_obs: Vec<&PrivFeatures> = mb.iter().map(|&i| &batch.priv_obs[i]).collect();
    let vb = ValueBatch::from_features(priv_obs.iter().copied());

    let cache = policy.forward(&pb);
    let cache_m = policy.forward(&pb_m);
    let vcache = value.forward(&vb);

    let log_std = policy.clamped_log_std();
    let actions: Vec<[f64; 3]> = mb.iter().map(|&i| batch.actions[i]).collect();
    let logp = gaussian_log_prob(&actions, &cache.mean, &log_std);

    // Losses.
    let mut surrogate = 0.0;
    let mut mean_ratio = 0.0;
    let mut g_mean = Array2::<f64>::zeros((m, 3));
    let mut g_log_std = Array1::<f64>::zeros(3);
    for (row, &i) in mb.iter().enumerate() {
        let adv = batch.advantages[i];
        let ratio = (logp[row] - batch.log_probs[i]).exp();
        mean_ratio += ratio / m as f64;
        let clipped = ratio.clamp(1.0 - cfg.clip, 1.0 + cfg.clip);
        let unclipped_term = ratio * adv;
        let clipped_term = clipped * adv;
        surrogate += -unclipped_term.min(clipped_term) / m as f64;
        // Gradient flows only where the unclipped branch is active.
        if unclipped_term <= clipped_term {
            let d_logp = -adv * ratio / m as f64;
            for k in 0..3 {
                let sigma = log_std[k].exp();
                let z = (actions[row][k] - cache.mean[(row, k)]) / sigma;
                g_mean[(row, k)] += d_logp * (z / sigma);
                g_log_std[k] += d_logp * (z * z - 1.0);
            }
        }
    }

    // Entropy bonus (state-independent Gaussian).
    let entropy = gaussian_entropy(&log_std);
    for k in 0..3 {
        g_log_std[k] += -cfg.entropy_coef;
    }

    // Mirror loss: w·Σ‖μ(s) − Ψ[μ(Ψs)]‖².
    let w = cfg.mirror_weight;
    let mut mirror_loss = 0.0;
    let mut g_mean_m = Array2::<f64>::zeros((m, 3));
    for row in 0..m {
        let psi_mu2 = [
            cache_m.mean[(row, 0)],
            -cache_m.mean[(row, 1)],
            cache_m.mean[(row, 2)],
        ];
        let res = [
            cache.mean[(row, 0)] - psi_mu2[0],
            cache.mean[(row, 1)] - psi_mu2[1],
            cache.mean[(row, 2)] - psi_mu2[2],
        ];
        mirror_loss += w * (res[0] * res[0] + res[1] * res[1] + res[2] * res[2]);
        g_mean[(row, 0)] += 2.0 * w * res[0];
        g_mean[(row, 1)] += 2.0 * w * res[1];
        g_mean[(row, 2)] += 2.0 * w * res[2];
        g_mean_m[(row, 0)] += -2.0 * w * res[0];
        g_mean_m[(row, 1)] += 2.0 * w * res[1];
        g_mean_m[(row, 2)] += -2.0 * w * res[2];
    }

    // Value regression.
    let mut value_loss = 0.0;
    let mut g_value = Array1::<f64>::zeros(m);
    for (row, &i) in mb.iter().enumerate() {
        let err = vcache.value[row] - batch.returns[i];
        value_loss += cfg.value_coef * err * err / m as f64;
        g_value[row] = cfg.value_coef * 2.0 * err / m as f64;
    }

    let total = surrogate + value_loss - cfg.entropy_coef * entropy + mirror_loss;
    if !total.is_finite() {
        return Err(LearnError::NonFinite(format!(
            "surrogate {surrogate}, value {value_loss}, mirror {mirror_loss}"
        )));
    }

    // Backward + optimize.
    policy.zero_grads();
    value.zero_grads();
    policy.backward(&cache, &g_mean);
    policy.backward(&cache_m, &g_mean_m);
    // log-std gradient with the clamp indicator.
    for k in 0..3 {
        let inside = policy.log_std[k] > LOG_STD_MIN && policy.log_std[k] < LOG_STD_MAX;
        policy.g_log_std[k] += if inside { g_log_std[k] } else { 0.0 };
    }
    value.backward(&vcache, &g_value);

    let mut gp = policy.grads_flat();
    let norm_p = clip_grad_norm(&mut gp, cfg.grad_clip);
    let mut params_p = policy.params_flat();
    opt_policy.step(&mut params_p, &gp);
    policy.set_params(&params_p);

    let mut gv = value.grads_flat();
    let norm_v = clip_grad_norm(&mut gv, cfg.grad_clip);
    let mut params_v = value.params_flat();
    opt_value.step(&mut params_v, &gv);
    value.set_params(&params_v);

    Ok(PpoLosses {
        surrogate,
        value: value_loss,
        entropy,
        mirror: mirror_loss,
        grad_norm_policy: norm_p,
        grad_norm_value: norm_v,
        mean_ratio,
    })
}
