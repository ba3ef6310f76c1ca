//! Continuous single-support dynamics and the touchdown reset map.
//!
//! The state matrix decouples into a sagittal (x_com, l_y) and a lateral
//! (y_com, l_x) 2×2 subsystem, both hyperbolic with frequency ω = sqrt(g/H),
//! so the flow is evaluated in closed form instead of a generic matrix
//! exponential.

use nalgebra::Matrix4;

use crate::action::{FootstepAction, ReachBox, SwingSide};
use crate::error::AlipError;
use crate::params::AlipParams;
use crate::state::AlipState;

/// Continuous-time state matrix of the mass-normalized ALIP model.
///
/// Nonzero entries: A[0][3] = 1/H, A[1][2] = −1/H, A[2][1] = −g,
/// A[3][0] = g.
pub fn alip_matrix(params: &AlipParams) -> Result<Matrix4<f64>, AlipError> {
    params.validate()?;
    let h = params.com_height;
    let g = params.gravity;
    let mut a = Matrix4::zeros();
    a[(0, 3)] = 1.0 / h;
    a[(1, 2)] = -1.0 / h;
    a[(2, 1)] = -g;
    a[(3, 0)] = g;
    Ok(a)
}

/// Exact solution of the single-support dynamics after `t` seconds.
pub fn flow(state: &AlipState, t: f64, params: &AlipParams) -> Result<AlipState, AlipError> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(AlipError::Domain(format!("flow time must be >= 0, got {t}")));
    }
    Ok(flow_unchecked(state, t, params.com_height, params.gravity))
}

/// Closed-form flow of the two hyperbolic subsystems.
///
/// Sagittal: x(t) = x₀ch + l_y₀ sh/(Hω),  l_y(t) = l_y₀ ch + x₀ Hω sh
/// Lateral:  y(t) = y₀ch − l_x₀ sh/(Hω),  l_x(t) = l_x₀ ch − y₀ Hω sh
fn flow_unchecked(state: &AlipState, t: f64, h: f64, g: f64) -> AlipState {
    let omega = (g / h).sqrt();
    let (sh, ch) = {
        let wt = omega * t;
        (wt.sinh(), wt.cosh())
    };
    let how = h * omega;
    AlipState {
        x_com: state.x_com * ch + state.l_y * sh / how,
        y_com: state.y_com * ch - state.l_x * sh / how,
        l_x: state.l_x * ch - state.y_com * how * sh,
        l_y: state.l_y * ch + state.x_com * how * sh,
    }
}

/// Constant external force on the pelvis [N], applied at the CoM.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PelvisForce {
    pub f_x: f64,
    pub f_y: f64,
    pub f_z: f64,
}

impl PelvisForce {
    pub fn is_zero(&self) -> bool {
        self.f_x == 0.0 && self.f_y == 0.0 && self.f_z == 0.0
    }
}

/// Flow under a constant pelvis force held over `t`.
///
/// The force enters as a mass-normalized momentum rate l̇ += (r × F)/m with
/// r = (x_com, y_com, H). The vertical component acts exactly like a gravity
/// shift g' = g − f_z/m, and the horizontal components add a constant
/// forcing, so the solution stays closed-form: flow about the shifted
/// equilibrium x* = −H·f_x/(m·g'), y* = −H·f_y/(m·g').
pub fn flow_forced(
    state: &AlipState,
    t: f64,
    params: &AlipParams,
    force: PelvisForce,
) -> Result<AlipState, AlipError> {
    params.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(AlipError::Domain(format!("flow time must be >= 0, got {t}")));
    }
    if force.is_zero() {
        return Ok(flow_unchecked(state, t, params.com_height, params.gravity));
    }
    let h = params.com_height;
    let g_eff = params.gravity - force.f_z / params.mass;
    if g_eff <= 0.0 {
        return Err(AlipError::Domain(format!(
            "vertical force cancels gravity (g' = {g_eff})"
        )));
    }
    let x_eq = -h * force.f_x / (params.mass * g_eff);
    let y_eq = -h * force.f_y / (params.mass * g_eff);
    let shifted = AlipState {
        x_com: state.x_com - x_eq,
        y_com: state.y_com - y_eq,
        l_x: state.l_x,
        l_y: state.l_y,
    };
    let flowed = flow_unchecked(&shifted, t, h, g_eff);
    Ok(AlipState {
        x_com: flowed.x_com + x_eq,
        y_com: flowed.y_com + y_eq,
        l_x: flowed.l_x,
        l_y: flowed.l_y,
    })
}

/// Raw touchdown reset map, without reach validation.
///
/// Positions shift by the contact offset; the momentum transfers by the
/// point-mass identity l⁺ = l⁻ + (p_c⁻ − p_c⁺) × v_com with
/// v_com = (l_y/H, −l_x/H, 0) evaluated at touchdown, of which only the
/// vertical offset contributes to the horizontal components:
/// l_x⁺ = l_x + p_z·v_y,  l_y⁺ = l_y − p_z·v_x.
///
/// Used directly for realized touchdowns (a prematurely interrupted swing
/// may legitimately land outside the commanded reach box).
pub fn reset_map(state: &AlipState, p_x: f64, p_y: f64, p_z: f64, params: &AlipParams) -> AlipState {
    let (v_x, v_y) = state.com_velocity(params);
    AlipState {
        x_com: state.x_com - p_x,
        y_com: state.y_com - p_y,
        l_x: state.l_x + p_z * v_y,
        l_y: state.l_y - p_z * v_x,
    }
}

/// Validated touchdown reset for commanded footsteps.
pub fn touchdown_reset(
    state: &AlipState,
    footstep: &FootstepAction,
    side: SwingSide,
    reach: &ReachBox,
    params: &AlipParams,
) -> Result<AlipState, AlipError> {
    params.validate()?;
    if !reach.contains(footstep, side) {
        return Err(AlipError::OutsideReachBox {
            px: footstep.p_x,
            py: footstep.p_y,
            pz: footstep.p_z,
        });
    }
    Ok(reset_map(
        state,
        footstep.p_x,
        footstep.p_y,
        footstep.p_z,
        params,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> AlipParams {
        AlipParams::default()
    }

    #[test]
    fn matrix_entries_match_model() {
        let p = AlipParams {
            com_height: 1.0,
            ..params()
        };
        let a = alip_matrix(&p).unwrap();
        assert_eq!(a[(0, 3)], 1.0);
        assert_eq!(a[(2, 1)], -9.81);
        assert_eq!(a[(3, 0)], 9.81);
        assert_eq!(a[(1, 2)], -1.0);

        let p2 = AlipParams {
            com_height: 2.0,
            ..params()
        };
        assert_eq!(alip_matrix(&p2).unwrap()[(0, 3)], 0.5);
    }

    #[test]
    fn matrix_has_zero_diagonal_and_trace() {
        let a = alip_matrix(&params()).unwrap();
        for i in 0..4 {
            assert_eq!(a[(i, i)], 0.0);
        }
        assert_eq!(a.trace(), 0.0);
    }

    #[test]
    fn matrix_rejects_invalid_params() {
        let bad = AlipParams {
            com_height: 0.0,
            ..params()
        };
        assert!(alip_matrix(&bad).is_err());
    }

    #[test]
    fn flow_fixes_zero_state() {
        let s = flow(&AlipState::zero(), 0.73, &params()).unwrap();
        assert_eq!(s, AlipState::zero());
    }

    #[test]
    fn flow_at_zero_time_is_identity() {
        let s0 = AlipState::new(0.05, -0.1, 0.02, 0.3);
        let s = flow(&s0, 0.0, &params()).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn flow_rejects_negative_time() {
        assert!(flow(&AlipState::zero(), -0.1, &params()).is_err());
    }

    #[test]
    fn sagittal_and_lateral_decouple() {
        let p = params();
        let base = AlipState::new(0.03, 0.0, 0.0, 0.2);
        let perturbed = AlipState::new(0.03, 0.07, -0.4, 0.2);
        let a = flow(&base, 0.21, &p).unwrap();
        let b = flow(&perturbed, 0.21, &p).unwrap();
        assert_eq!(a.x_com, b.x_com);
        assert_eq!(a.l_y, b.l_y);
    }

    #[test]
    fn orbital_invariant_conserved_short_horizon() {
        let p = params();
        let s0 = AlipState::new(0.05, -0.08, 0.1, 0.25);
        let (e_sag0, e_lat0) = s0.orbital_invariants(&p);
        for k in 1..=50 {
            let s = flow(&s0, 0.01 * k as f64, &p).unwrap();
            let (e_sag, e_lat) = s.orbital_invariants(&p);
            assert_relative_eq!(e_sag, e_sag0, epsilon = 1e-12);
            assert_relative_eq!(e_lat, e_lat0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reset_with_zero_offset_is_identity() {
        let p = params();
        let s0 = AlipState::new(0.05, -0.08, 0.1, 0.25);
        let s = reset_map(&s0, 0.0, 0.0, 0.0, &p);
        assert_eq!(s, s0);
    }

    #[test]
    fn reset_with_zero_momentum_shifts_positions_only() {
        let p = params();
        let s0 = AlipState::new(0.1, 0.05, 0.0, 0.0);
        let fs = FootstepAction::new(0.2, -0.2, 0.0, 0.0);
        let s = touchdown_reset(&s0, &fs, SwingSide::Right, &ReachBox::default(), &p).unwrap();
        assert_eq!(s.x_com, s0.x_com - 0.2);
        assert_eq!(s.y_com, s0.y_com + 0.2);
        assert_eq!(s.l_x, 0.0);
        assert_eq!(s.l_y, 0.0);
    }

    #[test]
    fn reset_momentum_transfer_matches_direct_angular_momentum() {
        // Oracle: evaluate l = (p_com − p_c) × v about both contacts with
        // CoM at (x, y, H) and v = (v, 0, 0). A contact raised by p_z
        // reduces the lever arm: l_y⁺ = (H − p_z)·v = l_y − p_z·v.
        let p = params();
        let v = 0.7;
        let s0 = AlipState::new(0.0, 0.1, 0.0, p.com_height * v);
        let p_z = 0.1;
        let fs = FootstepAction::new(0.0, 0.05, p_z, 0.0);
        let s = touchdown_reset(&s0, &fs, SwingSide::Left, &ReachBox::default(), &p).unwrap();
        let l_y_about_new_contact = (p.com_height - p_z) * v;
        assert_relative_eq!(s.l_y, l_y_about_new_contact, epsilon = 1e-15);
        assert_relative_eq!(s.l_y, s0.l_y - p_z * v, epsilon = 1e-15);
        // No lateral velocity, so l_x is untouched.
        assert_eq!(s.l_x, s0.l_x);
    }

    #[test]
    fn reset_rejects_out_of_reach() {
        let p = params();
        let fs = FootstepAction::new(0.9, 0.2, 0.0, 0.0);
        let err = touchdown_reset(
            &AlipState::zero(),
            &fs,
            SwingSide::Left,
            &ReachBox::default(),
            &p,
        );
        assert!(matches!(err, Err(AlipError::OutsideReachBox { .. })));
    }

    #[test]
    fn forced_flow_reduces_to_flow_when_force_is_zero() {
        let p = params();
        let s0 = AlipState::new(0.02, -0.03, 0.05, 0.1);
        let a = flow(&s0, 0.2, &p).unwrap();
        let b = flow_forced(&s0, 0.2, &p, PelvisForce::default()).unwrap();
        assert_eq!(a, b);
    }
}
