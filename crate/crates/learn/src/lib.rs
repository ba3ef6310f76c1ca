//! Learning stack: hand-rolled differentiable layers, a Gaussian footstep
//! policy with a privileged critic, PPO with a symmetric mirror loss,
//! LQR behavior-cloning pre-training, and gradient-based attribution.

mod adam;
mod attribution;
mod bc;
mod checkpoint;
mod error;
mod features;
mod gae;
mod nn;
mod policy;
mod ppo;
mod train;

pub use adam::Adam;
pub use attribution::{integrated_gradients, saliency, Attribution, DiffFn, PolicyActionNorm};
pub use bc::{behavior_clone, BcConfig, BcReport};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use error::LearnError;
pub use features::{
    mirror_features, obs_features, privileged_features, ObsFeatures, PrivFeatures, MAP_CELLS,
    PRIV_VEC_DIM, VEC_DIM,
};
pub use gae::gae;
pub use nn::{FlatParams, Linear, PatchLinear};
pub use policy::{PolicyNet, PolicyNetConfig, ValueNet};
pub use ppo::{
    gaussian_entropy, gaussian_log_prob, ppo_update, PpoConfig, PpoLosses, RolloutBatch,
};
pub use train::{
    collect_rollout, evaluate_policy, train, IterationMetrics, RolloutStats, TrainConfig,
    TrainOutput, TrainStage,
};
