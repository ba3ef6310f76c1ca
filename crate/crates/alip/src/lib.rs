//! Reduced-order footstep planning on the mass-normalized ALIP model.
//!
//! The crate provides the closed-form single-support flow, the touchdown
//! reset with point-mass momentum transfer, periodic-orbit footstep targets
//! for a commanded walking velocity, and a discrete LQR over the
//! step-to-step map. Everything is a pure function of its inputs; there is
//! no shared mutable state anywhere.

mod action;
mod dynamics;
mod error;
mod lqr;
mod orbit;
mod params;
mod state;

pub use action::{FootstepAction, ReachBox, SwingSide};
pub use dynamics::{alip_matrix, flow, flow_forced, reset_map, touchdown_reset, PelvisForce};
pub use error::AlipError;
pub use lqr::{
    closed_loop_spectral_radius, lqr_gain, lqr_plan, step_to_step_matrices, LqrGain, LqrWeights,
};
pub use orbit::{
    desired_footstep, nominal_step_offset, orbit_state_end_of_step, orbit_state_start_of_step,
    DesiredFootstep,
};
pub use params::{AlipParams, ValidityEnvelope};
pub use state::AlipState;
