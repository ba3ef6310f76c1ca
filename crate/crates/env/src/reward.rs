use serde::{Deserialize, Serialize};

use crate::config::RewardCoefficients;

/// Everything the reward formulas consume for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardContext {
    pub v: (f64, f64),
    pub v_des: (f64, f64),
    /// Terrain height at the commanded footstep XY, stance-relative.
    pub a_z_gt: f64,
    /// Commanded footstep height, stance-relative.
    pub a_z: f64,
    /// Yaw-rate proxy.
    pub omega_z: f64,
    pub action: [f64; 3],
    pub prev_action: [f64; 3],
    /// Optimal footstep XY from the blind LQR.
    pub lqr_action_xy: (f64, f64),
    /// Normalized swing tracking error.
    pub tracking_err: f64,
    /// Σ over objectives of squared (scaled) command magnitudes.
    pub commands_sq: f64,
    pub stepped_on_edge: bool,
    pub collision: bool,
}

/// Per-term reward decomposition; `total = max(Σ rewards − Σ penalties, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_vx: f64,
    pub r_vy: f64,
    pub r_z: f64,
    pub r_phi: f64,
    pub r_at: f64,
    pub r_reg: f64,
    pub p_track: f64,
    pub p_tau: f64,
    pub p_edge: f64,
    pub p_collision: f64,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn reward_sum(&self) -> f64 {
        self.r_vx + self.r_vy + self.r_z + self.r_phi + self.r_at + self.r_reg
    }

    pub fn penalty_sum(&self) -> f64 {
        self.p_track + self.p_tau + self.p_edge + self.p_collision
    }
}

fn norm2(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// The published reward table, verbatim, with the non-negativity clamp on
/// the total.
pub fn reward(ctx: &RewardContext, c: &RewardCoefficients) -> RewardBreakdown {
    let r_vx = c.w_vx * (-c.k_vx * (ctx.v_des.0 - ctx.v.0).abs()).exp();
    let r_vy = c.w_vy * (-c.k_vy * (ctx.v_des.1 - ctx.v.1).abs()).exp();
    let r_z = c.w_z * (-c.k_z * (ctx.a_z_gt - ctx.a_z).abs()).exp();
    let r_phi = c.w_phi * (-c.k_phi * ctx.omega_z.abs()).exp();
    let da = [
        ctx.action[0] - ctx.prev_action[0],
        ctx.action[1] - ctx.prev_action[1],
        ctx.action[2] - ctx.prev_action[2],
    ];
    let r_at = c.w_smooth * (-c.k_smooth * norm3(&da)).exp();
    let r_reg = c.w_reg
        * (-c.k_reg
            * norm2(
                ctx.lqr_action_xy.0 - ctx.action[0],
                ctx.lqr_action_xy.1 - ctx.action[1],
            ))
        .exp();

    let p_track = (c.track_gain * (ctx.tracking_err - c.track_margin)).exp() - 1.0;
    let p_tau = c.torque * ctx.commands_sq;
    let p_edge = if ctx.stepped_on_edge { c.edge } else { 0.0 };
    let p_collision = if ctx.collision { c.collision } else { 0.0 };

    let rewards = r_vx + r_vy + r_z + r_phi + r_at + r_reg;
    let penalties = p_track + p_tau + p_edge + p_collision;
    RewardBreakdown {
        r_vx,
        r_vy,
        r_z,
        r_phi,
        r_at,
        r_reg,
        p_track,
        p_tau,
        p_edge,
        p_collision,
        total: (rewards - penalties).max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_error_ctx() -> RewardContext {
        RewardContext {
            v: (0.4, 0.0),
            v_des: (0.4, 0.0),
            a_z_gt: 0.1,
            a_z: 0.1,
            omega_z: 0.0,
            action: [0.1, 0.2, 0.1],
            prev_action: [0.1, 0.2, 0.1],
            lqr_action_xy: (0.1, 0.2),
            tracking_err: 0.05,
            commands_sq: 0.0,
            stepped_on_edge: false,
            collision: false,
        }
    }

    #[test]
    fn zero_error_zero_penalty_totals_exactly_1_5() {
        let b = reward(&zero_error_ctx(), &RewardCoefficients::default());
        assert_eq!(b.r_vx, 0.5);
        assert_eq!(b.r_vy, 0.25);
        assert_eq!(b.r_z, 0.3125);
        assert_eq!(b.r_phi, 0.1875);
        assert_eq!(b.r_at, 0.125);
        assert_eq!(b.r_reg, 0.125);
        assert_eq!(b.p_track, 0.0);
        assert_eq!(b.total, 1.5);
    }

    #[test]
    fn track_penalty_is_zero_at_the_margin() {
        let mut ctx = zero_error_ctx();
        ctx.tracking_err = 0.05;
        let b = reward(&ctx, &RewardCoefficients::default());
        assert_eq!(b.p_track, 0.0);
    }

    #[test]
    fn penalty_dominated_tick_clamps_to_zero() {
        let mut ctx = zero_error_ctx();
        ctx.v = (2.0, 1.0); // tiny velocity rewards
        ctx.collision = true;
        ctx.stepped_on_edge = true;
        let b = reward(&ctx, &RewardCoefficients::default());
        assert!(b.reward_sum() < b.penalty_sum());
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn small_tracking_error_yields_a_bounded_bonus() {
        let mut ctx = zero_error_ctx();
        ctx.tracking_err = 0.0;
        let c = RewardCoefficients::default();
        let b = reward(&ctx, &c);
        let floor = (c.track_gain * (-c.track_margin)).exp() - 1.0;
        assert!(b.p_track < 0.0);
        assert!((b.p_track - floor).abs() < 1e-15);
        assert!(b.total <= c.reward_sum() - floor + 1e-12);
    }

    #[test]
    fn every_reward_term_is_bounded_by_its_coefficient() {
        let c = RewardCoefficients::default();
        let mut ctx = zero_error_ctx();
        ctx.v = (0.1, -0.2);
        ctx.omega_z = 0.4;
        ctx.a_z = 0.0;
        ctx.action = [0.3, 0.1, 0.0];
        let b = reward(&ctx, &c);
        assert!(b.r_vx > 0.0 && b.r_vx <= c.w_vx);
        assert!(b.r_vy > 0.0 && b.r_vy <= c.w_vy);
        assert!(b.r_z > 0.0 && b.r_z <= c.w_z);
        assert!(b.r_phi > 0.0 && b.r_phi <= c.w_phi);
        assert!(b.r_at > 0.0 && b.r_at <= c.w_smooth);
        assert!(b.r_reg > 0.0 && b.r_reg <= c.w_reg);
        assert!(b.p_tau >= 0.0 && b.p_edge >= 0.0 && b.p_collision >= 0.0);
    }

    #[test]
    fn torque_penalty_scales_with_command_magnitude() {
        let c = RewardCoefficients::default();
        let mut ctx = zero_error_ctx();
        ctx.commands_sq = 1000.0;
        let b = reward(&ctx, &c);
        assert!((b.p_tau - 7.0e-6 * 1000.0).abs() < 1e-15);
    }
}
