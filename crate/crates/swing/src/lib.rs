//! Swing-foot trajectory planning and a surrogate tracking plant.
//!
//! The swing trajectory is a single-segment quintic per axis, solved from a
//! small equality-constrained QP (initial position/velocity/acceleration
//! continuity, terminal position, acceleration-energy + midpoint-shaping
//! objective). The plant stands in for the whole-body controller: per-axis
//! PD with feedforward around each tracked objective, integrated in closed
//! form.

mod error;
mod metrics;
mod plant;
mod spline;

pub use error::SwingError;
pub use metrics::l2_ratio;
pub use plant::{
    AxisState, OscGainTable, PlantDisturbance, PlantGains, PlantStepOutput, TrackingPlant,
};
pub use spline::{plan_spline, replan_on_new_target, BoundaryState, SplineWeights, SwingSpline};
