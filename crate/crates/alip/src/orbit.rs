//! Periodic walking orbits and the footstep target that steers onto them.
//!
//! For a commanded planar velocity the sagittal subsystem admits a period-1
//! orbit (x runs from −v_x·T/2 to +v_x·T/2 each step) and the lateral
//! subsystem a period-2 orbit whose feet alternate around the stance width.
//! The footstep offset is chosen so that the momentum at the end of the
//! *next* step equals the orbit momentum (deadbeat in one step for the
//! momentum coordinate, two steps for the full subsystem state).

use crate::action::{ReachBox, SwingSide};
use crate::dynamics::flow;
use crate::error::AlipError;
use crate::params::AlipParams;
use crate::state::AlipState;

/// Desired mass-normalized momentum at the end of a step whose stance foot
/// is `stance`, on the orbit with average velocity `v_des`.
///
/// On the zero-drift width orbit the CoM starts at the inter-foot midpoint
/// moving toward the stance foot and returns to the midpoint moving away,
/// so l_x at the end of a right-stance step is −(W·H·ω/2)·tanh(ωT/2) and
/// the sign alternates with the stance side. Drift components mirror the
/// sagittal period-1 value (v·T·H·ω/2)·coth(ωT/2).
fn orbit_momentum(v_des: (f64, f64), stance: SwingSide, params: &AlipParams) -> (f64, f64) {
    let omega = params.omega();
    let h = params.com_height;
    let t = params.step_duration;
    let half_wt = 0.5 * omega * t;
    let l_x_width =
        stance.lateral_sign() * 0.5 * params.stance_width * h * omega * half_wt.tanh();
    let coth = 1.0 / half_wt.tanh();
    let l_x_drift = -0.5 * v_des.1 * t * h * omega * coth;
    let l_y = 0.5 * v_des.0 * t * h * omega * coth;
    (l_x_width + l_x_drift, l_y)
}

/// State at the end of a single-support phase (just before touchdown) on
/// the periodic orbit with average velocity `v_des`, for the given stance
/// foot.
pub fn orbit_state_end_of_step(
    v_des: (f64, f64),
    stance: SwingSide,
    params: &AlipParams,
) -> AlipState {
    let t = params.step_duration;
    let sigma = -stance.lateral_sign(); // +1 for right stance
    let (l_x, l_y) = orbit_momentum(v_des, stance, params);
    AlipState {
        x_com: 0.5 * v_des.0 * t,
        y_com: sigma * 0.5 * params.stance_width + 0.5 * v_des.1 * t,
        l_x,
        l_y,
    }
}

/// State just after touchdown on the periodic orbit, for the given stance
/// foot. Positions mirror the end-of-step state; the width component of
/// l_x flips sign across the step.
pub fn orbit_state_start_of_step(
    v_des: (f64, f64),
    stance: SwingSide,
    params: &AlipParams,
) -> AlipState {
    let end = orbit_state_end_of_step(v_des, stance, params);
    let t = params.step_duration;
    let omega = params.omega();
    let half_wt = 0.5 * omega * t;
    let l_x_width =
        stance.lateral_sign() * 0.5 * params.stance_width * params.com_height * omega
            * half_wt.tanh();
    AlipState {
        x_com: -0.5 * v_des.0 * t,
        y_com: end.y_com - v_des.1 * t,
        l_x: end.l_x - 2.0 * l_x_width,
        l_y: end.l_y,
    }
}

/// Footstep offset taken by the orbit itself: (v_x·T, ±W + v_y·T).
pub fn nominal_step_offset(
    v_des: (f64, f64),
    swing: SwingSide,
    params: &AlipParams,
) -> (f64, f64) {
    let t = params.step_duration;
    (
        v_des.0 * t,
        swing.lateral_sign() * params.stance_width + v_des.1 * t,
    )
}

/// Output of [`desired_footstep`]: the touchdown offset plus a flag set
/// when the unconstrained solution had to be clamped into the reach box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredFootstep {
    pub u_x: f64,
    pub u_y: f64,
    pub saturated: bool,
}

/// Touchdown offset that drives the post-touchdown trajectory onto the
/// periodic orbit for `v_des`.
///
/// The current state is flowed for `time_to_touchdown` to predict the
/// pre-touchdown state, then the offset is solved in closed form from the
/// step-to-step map so the momentum at the end of the next step equals the
/// orbit momentum.
pub fn desired_footstep(
    v_des: (f64, f64),
    swing: SwingSide,
    state: &AlipState,
    time_to_touchdown: f64,
    params: &AlipParams,
    reach: &ReachBox,
) -> Result<DesiredFootstep, AlipError> {
    let s_td = flow(state, time_to_touchdown, params)?;
    let omega = params.omega();
    let h = params.com_height;
    let wt = omega * params.step_duration;
    let (sh, ch) = (wt.sinh(), wt.cosh());
    let how = h * omega;

    // Next step's stance foot is the one currently swinging.
    let (l_x_des, l_y_des) = orbit_momentum(v_des, swing, params);

    let u_x = s_td.x_com + (s_td.l_y * ch - l_y_des) / (how * sh);
    let u_y = s_td.y_com + (l_x_des - s_td.l_x * ch) / (how * sh);

    let (cx, cy, saturated) = reach.clamp_xy(u_x, u_y, swing);
    Ok(DesiredFootstep {
        u_x: cx,
        u_y: cy,
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::reset_map;
    use approx::assert_relative_eq;

    fn params() -> AlipParams {
        AlipParams::default()
    }

    /// Step the closed loop once: flow a full step from `s` (post-touchdown
    /// state), then reset with the desired footstep for `swing`.
    fn step_once(
        s: &AlipState,
        v_des: (f64, f64),
        swing: SwingSide,
        params: &AlipParams,
    ) -> (AlipState, (f64, f64)) {
        let u = desired_footstep(v_des, swing, s, params.step_duration, params, &ReachBox::default())
            .unwrap();
        let s_td = flow(s, params.step_duration, params).unwrap();
        (reset_map(&s_td, u.u_x, u.u_y, 0.0, params), (u.u_x, u.u_y))
    }

    #[test]
    fn orbit_end_state_is_periodic_under_flow_and_reset() {
        let p = params();
        for v in [(0.0, 0.0), (0.4, 0.0), (0.3, -0.2), (-0.5, 0.1)] {
            // Stance right, swing left.
            let s_td = orbit_state_end_of_step(v, SwingSide::Right, &p);
            let (u_x, u_y) = nominal_step_offset(v, SwingSide::Left, &p);
            let s_next0 = reset_map(&s_td, u_x, u_y, 0.0, &p);
            let s_next_td = flow(&s_next0, p.step_duration, &p).unwrap();
            let expect = orbit_state_end_of_step(v, SwingSide::Left, &p);
            for (a, b) in s_next_td.as_array().iter().zip(expect.as_array()) {
                assert_relative_eq!(a, &b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn on_orbit_desired_footstep_equals_nominal_offset() {
        let p = params();
        let v = (0.4, -0.1);
        // End-of-step state for right stance, about to place the left foot.
        let s_td = orbit_state_end_of_step(v, SwingSide::Right, &p);
        let u = desired_footstep(v, SwingSide::Left, &s_td, 0.0, &p, &ReachBox::default()).unwrap();
        let (n_x, n_y) = nominal_step_offset(v, SwingSide::Left, &p);
        assert_relative_eq!(u.u_x, n_x, epsilon = 1e-12);
        assert_relative_eq!(u.u_y, n_y, epsilon = 1e-12);
        assert!(!u.saturated);
    }

    #[test]
    fn lateral_offset_alternates_sign_with_stance_width() {
        let p = params();
        let s0 = reset_map(
            &orbit_state_end_of_step((0.0, 0.0), SwingSide::Right, &p),
            0.0,
            p.stance_width,
            0.0,
            &p,
        );
        let mut s = s0;
        let mut swing = SwingSide::Right; // left foot just landed
        let mut offsets = Vec::new();
        for _ in 0..8 {
            let (next, u) = step_once(&s, (0.0, 0.0), swing, &p);
            offsets.push(u.1);
            s = next;
            swing = swing.opposite();
        }
        for pair in offsets.windows(2) {
            assert!(pair[0] * pair[1] < 0.0, "lateral offsets must alternate");
        }
        for u_y in &offsets {
            assert_relative_eq!(u_y.abs(), p.stance_width, epsilon = 1e-9);
        }
    }

    #[test]
    fn off_orbit_state_converges_in_two_steps() {
        let p = params();
        let v = (0.4, 0.0);
        let mut s = AlipState::new(0.02, 0.12, -0.03, 0.15);
        let mut swing = SwingSide::Left;
        for _ in 0..4 {
            let (next, _) = step_once(&s, v, swing, &p);
            s = next;
            swing = swing.opposite();
        }
        // After convergence the end-of-step state must sit on the orbit.
        let stance = swing.opposite();
        let s_td = flow(&s, p.step_duration, &p).unwrap();
        let expect = orbit_state_end_of_step(v, stance, &p);
        for (a, b) in s_td.as_array().iter().zip(expect.as_array()) {
            assert_relative_eq!(a, &b, epsilon = 1e-9);
        }
    }

    #[test]
    fn start_state_flows_to_end_state() {
        let p = params();
        for v in [(0.0, 0.0), (0.5, 0.2), (-0.3, -0.1)] {
            for stance in [SwingSide::Left, SwingSide::Right] {
                let s0 = orbit_state_start_of_step(v, stance, &p);
                let s_end = flow(&s0, p.step_duration, &p).unwrap();
                let expect = orbit_state_end_of_step(v, stance, &p);
                for (a, b) in s_end.as_array().iter().zip(expect.as_array()) {
                    assert_relative_eq!(a, &b, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn saturation_flag_fires_outside_reach() {
        let p = params();
        // A huge forward command needs an offset beyond x_max.
        let s = AlipState::new(0.9, 0.1, 0.0, 4.0);
        let u = desired_footstep((0.0, 0.0), SwingSide::Left, &s, 0.0, &p, &ReachBox::default())
            .unwrap();
        assert!(u.saturated);
        assert!(u.u_x.abs() <= ReachBox::default().x_max);
    }
}
