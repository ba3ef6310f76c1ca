//! Discrete LQR over the ALIP step-to-step map.
//!
//! The map is taken on the pre-touchdown section: with z the end-of-step
//! state error, z⁺ = A_d·(z + b·ũ) = A_d·z + B_d·ũ, where A_d = exp(A·T),
//! b injects the footstep offset into the position coordinates with sign
//! −1 (the reset subtracts the offset) and B_d = A_d·b. Feedback therefore
//! acts on the predicted end-of-step deviation, matching the planner. The
//! gain solves the discrete algebraic Riccati equation by fixed-point
//! iteration.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::action::{FootstepAction, ReachBox, SwingSide};
use crate::dynamics::flow;
use crate::error::AlipError;
use crate::orbit::{nominal_step_offset, orbit_state_end_of_step};
use crate::params::AlipParams;
use crate::state::AlipState;

pub type GainMatrix = SMatrix<f64, 2, 4>;
type InputMatrix = SMatrix<f64, 4, 2>;

/// Cost weights for the footstep LQR. Defaults are not taken from any
/// published source; they are exposed through the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LqrWeights {
    pub q_diag: [f64; 4],
    pub r_diag: [f64; 2],
}

impl Default for LqrWeights {
    fn default() -> Self {
        // Momentum is weighted like position (l ~ H·v keeps the magnitudes
        // comparable); down-weighting it leaves a slow, strongly non-normal
        // closed loop that amplifies worst-case perturbations ~4x before
        // contracting.
        Self {
            q_diag: [1.0, 1.0, 1.0, 1.0],
            r_diag: [0.1, 0.1],
        }
    }
}

impl LqrWeights {
    pub fn q(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&self.q_diag.into())
    }

    pub fn r(&self) -> Matrix2<f64> {
        Matrix2::from_diagonal(&self.r_diag.into())
    }
}

/// Discretized step-to-step matrices (A_d, B_d) of the flow-then-reset map.
pub fn step_to_step_matrices(params: &AlipParams) -> Result<(Matrix4<f64>, InputMatrix), AlipError> {
    params.validate()?;
    let omega = params.omega();
    let how = params.com_height * omega;
    let wt = omega * params.step_duration;
    let (sh, ch) = (wt.sinh(), wt.cosh());
    let a_d = Matrix4::new(
        ch, 0.0, 0.0, sh / how, //
        0.0, ch, -sh / how, 0.0, //
        0.0, -how * sh, ch, 0.0, //
        how * sh, 0.0, 0.0, ch,
    );
    let b_inject = InputMatrix::new(
        -1.0, 0.0, //
        0.0, -1.0, //
        0.0, 0.0, //
        0.0, 0.0,
    );
    Ok((a_d, a_d * b_inject))
}

/// Solved feedback gain together with the matrices it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrGain {
    pub k: GainMatrix,
    pub a_d: Matrix4<f64>,
    pub b_d: InputMatrix,
}

const DARE_MAX_ITERS: usize = 10_000;
const DARE_TOLERANCE: f64 = 1e-10;

/// Solve the DARE for (A_d, B_d, Q, R) by fixed-point iteration and return
/// K = (R + BᵀPB)⁻¹BᵀPA.
///
/// The residual is measured relative to max(1, ‖P‖_max) so that large-R
/// problems (where P scales with R) still have a meaningful stopping rule.
pub fn lqr_gain(
    params: &AlipParams,
    q: &Matrix4<f64>,
    r: &Matrix2<f64>,
) -> Result<LqrGain, AlipError> {
    let (a_d, b_d) = step_to_step_matrices(params)?;
    let at = a_d.transpose();
    let bt = b_d.transpose();

    let mut p = *q;
    let mut converged = false;
    for _ in 0..DARE_MAX_ITERS {
        let btpb = r + bt * p * b_d;
        let inv = btpb
            .try_inverse()
            .ok_or_else(|| AlipError::Numerical("R + BᵀPB not invertible".into()))?;
        let p_next = at * p * a_d - at * p * b_d * inv * bt * p * a_d + q;
        let scale = p_next.amax().max(1.0);
        let residual = (p_next - p).amax() / scale;
        p = p_next;
        if residual < DARE_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(AlipError::Numerical(format!(
            "DARE fixed-point iteration did not reach {DARE_TOLERANCE:e} in {DARE_MAX_ITERS} iterations"
        )));
    }
    let inv = (r + bt * p * b_d)
        .try_inverse()
        .ok_or_else(|| AlipError::Numerical("R + BᵀPB not invertible".into()))?;
    let k = inv * bt * p * a_d;
    Ok(LqrGain { k, a_d, b_d })
}

/// Spectral radius of the closed-loop step-to-step map A_d − B_d·K.
pub fn closed_loop_spectral_radius(gain: &LqrGain) -> f64 {
    let cl = gain.a_d - gain.b_d * gain.k;
    cl.complex_eigenvalues()
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
}

/// Blind LQR footstep plan: u = u_nominal(v_des) − K·(x_pred(T⁻) −
/// x_orbit(T⁻)), with p_z = 0 (flat-plane assumption). The second return
/// value reports reach-box clamping.
pub fn lqr_plan(
    state: &AlipState,
    v_des: (f64, f64),
    swing: SwingSide,
    time_to_touchdown: f64,
    params: &AlipParams,
    gain: &LqrGain,
    reach: &ReachBox,
) -> Result<(FootstepAction, bool), AlipError> {
    let s_pred = flow(state, time_to_touchdown, params)?;
    // Current stance is the opposite of the swinging foot.
    let s_orbit = orbit_state_end_of_step(v_des, swing.opposite(), params);
    let err =
        nalgebra::Vector4::from(s_pred.as_array()) - nalgebra::Vector4::from(s_orbit.as_array());
    let u_fb = gain.k * err;
    let (n_x, n_y) = nominal_step_offset(v_des, swing, params);
    let (c_x, c_y, clamped) = reach.clamp_xy(n_x - u_fb[0], n_y - u_fb[1], swing);
    let phase = 1.0 - (time_to_touchdown / params.step_duration).clamp(0.0, 1.0);
    Ok((FootstepAction::new(c_x, c_y, 0.0, phase), clamped))
}
