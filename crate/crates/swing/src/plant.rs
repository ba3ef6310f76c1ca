use serde::{Deserialize, Serialize};

use crate::error::SwingError;
use crate::spline::SwingSpline;

/// The published whole-body controller gain table (diagonal weight and gain
/// vectors per objective). Only the foot-xyz and CoM-z rows drive the
/// surrogate plant; the rest are carried as configuration data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OscGainTable {
    pub toe_joint: (f64, f64, f64),
    pub hip_yaw: (f64, f64, f64),
    pub pelvis_xy_w: [f64; 2],
    pub pelvis_xy_kp: [f64; 2],
    pub pelvis_xy_kd: [f64; 2],
    pub pelvis_yaw: (f64, f64, f64),
    pub com_z: (f64, f64, f64),
    pub foot_w: [f64; 3],
    pub foot_kp: [f64; 3],
    pub foot_kd: [f64; 3],
}

impl Default for OscGainTable {
    fn default() -> Self {
        Self {
            toe_joint: (1.0, 1500.0, 10.0),
            hip_yaw: (2.0, 100.0, 4.0),
            pelvis_xy_w: [2.0, 4.0],
            pelvis_xy_kp: [200.0, 200.0],
            pelvis_xy_kd: [10.0, 10.0],
            pelvis_yaw: (0.02, 0.0, 10.0),
            com_z: (10.0, 80.0, 5.0),
            foot_w: [4.0, 4.0, 2.0],
            foot_kp: [400.0, 400.0, 400.0],
            foot_kd: [20.0, 20.0, 25.0],
        }
    }
}

/// Gains actually used by the surrogate plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantGains {
    pub foot_kp: [f64; 3],
    pub foot_kd: [f64; 3],
    pub com_z_kp: f64,
    pub com_z_kd: f64,
    /// Command saturation [m/s²].
    pub saturation: f64,
    /// Inner-loop integration step [s].
    pub dt: f64,
}

impl Default for PlantGains {
    fn default() -> Self {
        let table = OscGainTable::default();
        Self {
            foot_kp: table.foot_kp,
            foot_kd: table.foot_kd,
            com_z_kp: table.com_z.1,
            com_z_kd: table.com_z.2,
            saturation: 200.0,
            dt: 1.0 / 2000.0,
        }
    }
}

impl PlantGains {
    pub fn validate(&self) -> Result<(), SwingError> {
        let all = self
            .foot_kp
            .iter()
            .chain(self.foot_kd.iter())
            .chain([&self.com_z_kp, &self.com_z_kd, &self.saturation, &self.dt]);
        for v in all {
            if !(v.is_finite() && *v > 0.0) {
                return Err(SwingError::Parameter(format!(
                    "plant gains must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AxisState {
    pub pos: f64,
    pub vel: f64,
}

/// Constant accelerations injected into the plant, per axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlantDisturbance {
    pub foot: [f64; 3],
    pub com_z: f64,
}

/// One inner-loop step's outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantStepOutput {
    pub foot_des_pos: [f64; 3],
    pub foot_des_vel: [f64; 3],
    pub foot_pos: [f64; 3],
    pub foot_vel: [f64; 3],
    pub com_z_des: f64,
    pub com_z: f64,
    pub com_z_vel: f64,
    /// Post-saturation command accelerations [foot x, y, z, com z].
    pub commands: [f64; 4],
}

/// Per-axis second-order surrogate for the low-level controller: command
/// a_cmd = p̈_des + Kp·(p_des − p) + Kd·(ṗ_des − ṗ), saturated; the plant
/// integrates p̈ = a_cmd + disturbance.
///
/// Unsaturated steps advance the error dynamics ë + Kd·ė + Kp·e = d in
/// closed form, so a plant initialized on the trajectory with zero
/// disturbance tracks it exactly. Saturated steps hold the clipped command
/// for the inner step and integrate exactly against the polynomial
/// reference.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingPlant {
    pub foot: [AxisState; 3],
    pub com_z: AxisState,
    pub gains: PlantGains,
}

impl TrackingPlant {
    pub fn new(gains: PlantGains) -> Result<Self, SwingError> {
        gains.validate()?;
        Ok(Self {
            foot: [AxisState::default(); 3],
            com_z: AxisState::default(),
            gains,
        })
    }

    /// Place the swing foot exactly on the spline at time t and the CoM at
    /// its reference.
    pub fn reset_on_trajectory(&mut self, spline: &SwingSpline, t: f64, com_z_ref: f64) {
        let p = spline.position(t);
        let v = spline.velocity(t);
        for a in 0..3 {
            self.foot[a] = AxisState {
                pos: p[a],
                vel: v[a],
            };
        }
        self.com_z = AxisState {
            pos: com_z_ref,
            vel: 0.0,
        };
    }

    /// Advance one inner step from time `t` to `t + dt` along the spline.
    /// `com_z_ref` is the constant CoM height reference over the step.
    pub fn step(
        &mut self,
        spline: &SwingSpline,
        t: f64,
        com_z_ref: f64,
        disturbance: &PlantDisturbance,
    ) -> PlantStepOutput {
        let dt = self.gains.dt;
        let mut commands = [0.0; 4];
        let p_des0 = spline.position(t);
        let v_des0 = spline.velocity(t);
        let a_des0 = spline.acceleration(t);
        let p_des1 = spline.position(t + dt);
        let v_des1 = spline.velocity(t + dt);

        for axis in 0..3 {
            let kp = self.gains.foot_kp[axis];
            let kd = self.gains.foot_kd[axis];
            let st = &mut self.foot[axis];
            let e = st.pos - p_des0[axis];
            let edot = st.vel - v_des0[axis];
            let a_cmd = a_des0[axis] - kp * e - kd * edot;
            let a_sat = a_cmd.clamp(-self.gains.saturation, self.gains.saturation);
            commands[axis] = a_sat;
            if a_sat == a_cmd {
                let (e1, edot1) =
                    damped_step(e, edot, kp, kd, disturbance.foot[axis], dt);
                st.pos = p_des1[axis] + e1;
                st.vel = v_des1[axis] + edot1;
            } else {
                // Held command: p̈ constant over the inner step.
                let acc = a_sat + disturbance.foot[axis];
                st.pos += st.vel * dt + 0.5 * acc * dt * dt;
                st.vel += acc * dt;
            }
        }

        // CoM z tracks a constant reference (feedforward zero).
        {
            let kp = self.gains.com_z_kp;
            let kd = self.gains.com_z_kd;
            let e = self.com_z.pos - com_z_ref;
            let edot = self.com_z.vel;
            let a_cmd = -kp * e - kd * edot;
            let a_sat = a_cmd.clamp(-self.gains.saturation, self.gains.saturation);
            commands[3] = a_sat;
            if a_sat == a_cmd {
                let (e1, edot1) = damped_step(e, edot, kp, kd, disturbance.com_z, dt);
                self.com_z.pos = com_z_ref + e1;
                self.com_z.vel = edot1;
            } else {
                let acc = a_sat + disturbance.com_z;
                self.com_z.pos += self.com_z.vel * dt + 0.5 * acc * dt * dt;
                self.com_z.vel += acc * dt;
            }
        }

        PlantStepOutput {
            foot_des_pos: p_des1,
            foot_des_vel: v_des1,
            foot_pos: [self.foot[0].pos, self.foot[1].pos, self.foot[2].pos],
            foot_vel: [self.foot[0].vel, self.foot[1].vel, self.foot[2].vel],
            com_z_des: com_z_ref,
            com_z: self.com_z.pos,
            com_z_vel: self.com_z.vel,
            commands,
        }
    }
}

/// Exact step of ë + kd·ė + kp·e = d over dt.
fn damped_step(e0: f64, edot0: f64, kp: f64, kd: f64, d: f64, dt: f64) -> (f64, f64) {
    let e_ss = d / kp;
    let y0 = e0 - e_ss;
    let ydot0 = edot0;
    let disc = kd * kd - 4.0 * kp;
    let (y, ydot) = if disc < 0.0 {
        let alpha = -0.5 * kd;
        let beta = 0.5 * (-disc).sqrt();
        let (s, c) = (beta * dt).sin_cos();
        let ea = (alpha * dt).exp();
        let b_coef = (ydot0 - alpha * y0) / beta;
        let y = ea * (y0 * c + b_coef * s);
        let ydot = ea * (ydot0 * c + (alpha * b_coef - beta * y0) * s);
        (y, ydot)
    } else if disc > 0.0 {
        let root = disc.sqrt();
        let r1 = 0.5 * (-kd + root);
        let r2 = 0.5 * (-kd - root);
        let c1 = (ydot0 - r2 * y0) / (r1 - r2);
        let c2 = y0 - c1;
        let e1 = (r1 * dt).exp();
        let e2 = (r2 * dt).exp();
        (c1 * e1 + c2 * e2, c1 * r1 * e1 + c2 * r2 * e2)
    } else {
        let r = -0.5 * kd;
        let c2 = ydot0 - r * y0;
        let er = (r * dt).exp();
        (
            (y0 + c2 * dt) * er,
            (ydot0 + c2 * r * dt) * er,
        )
    };
    (y + e_ss, ydot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::{plan_spline, BoundaryState, SplineWeights};

    fn swing_spline() -> SwingSpline {
        let w = SplineWeights::default();
        let bc = BoundaryState::default();
        let target = [0.3, 0.1, 0.0];
        let mid = w.default_mid_target(bc.pos, target);
        plan_spline(&bc, target, mid, &w, 0.0, 0.3).unwrap()
    }

    #[test]
    fn zero_disturbance_tracks_exactly() {
        let spline = swing_spline();
        let mut plant = TrackingPlant::new(PlantGains::default()).unwrap();
        plant.reset_on_trajectory(&spline, 0.0, 0.85);
        let dt = plant.gains.dt;
        let n = (0.3 / dt) as usize;
        let d = PlantDisturbance::default();
        let mut max_err: f64 = 0.0;
        for k in 0..n {
            let t = k as f64 * dt;
            let out = plant.step(&spline, t, 0.85, &d);
            for a in 0..3 {
                max_err = max_err.max((out.foot_pos[a] - out.foot_des_pos[a]).abs());
            }
            max_err = max_err.max((out.com_z - 0.85).abs());
        }
        assert!(max_err < 1e-6, "tracking error {max_err}");
    }

    #[test]
    fn constant_disturbance_settles_at_d_over_kp() {
        let spline = SwingSpline::stationary([0.0; 3], 0.0, 10.0);
        let mut plant = TrackingPlant::new(PlantGains::default()).unwrap();
        plant.reset_on_trajectory(&spline, 0.0, 0.85);
        let d = PlantDisturbance {
            foot: [0.0, 0.0, 4.0],
            com_z: 0.0,
        };
        let dt = plant.gains.dt;
        let mut out = plant.step(&spline, 0.0, 0.85, &d);
        for k in 1..(2.0 / dt) as usize {
            out = plant.step(&spline, k as f64 * dt, 0.85, &d);
        }
        let expected = 4.0 / plant.gains.foot_kp[2];
        assert!(
            (out.foot_pos[2] - expected).abs() < 1e-9,
            "steady-state {} vs {}",
            out.foot_pos[2],
            expected
        );
    }

    #[test]
    fn foot_gains_are_underdamped() {
        let g = PlantGains::default();
        for a in 0..3 {
            assert!(g.foot_kd[a] * g.foot_kd[a] - 4.0 * g.foot_kp[a] < 0.0);
        }
    }

    /// Closed-form 2nd-order check: the (400, 20) loop's step response
    /// overshoots (underdamped) and its damped frequency matches
    /// sqrt(4Kp − Kd²)/2.
    #[test]
    fn step_response_matches_underdamped_closed_form() {
        let kp = 400.0;
        let kd = 20.0;
        let dt = 1e-4;
        let mut e = 0.01;
        let mut edot = 0.0;
        let mut min_e = e;
        let mut t_cross = None;
        for k in 0..20_000 {
            let (e1, edot1) = damped_step(e, edot, kp, kd, 0.0, dt);
            e = e1;
            edot = edot1;
            if e < 0.0 && t_cross.is_none() {
                t_cross = Some(k as f64 * dt);
            }
            min_e = min_e.min(e);
        }
        assert!(min_e < 0.0, "underdamped response must overshoot");
        // First zero crossing of e(t) = e0·exp(αt)(cos βt + (−α/β) sin βt).
        let alpha: f64 = -0.5 * kd;
        let beta = 0.5 * (4.0f64 * kp - kd * kd).sqrt();
        let phi = (beta / (-alpha)).atan();
        let t_expected = (std::f64::consts::PI - phi) / beta;
        let t_cross = t_cross.unwrap();
        assert!(
            (t_cross - t_expected).abs() < 2e-3,
            "crossing {t_cross} vs {t_expected}"
        );
    }

    #[test]
    fn undisturbed_error_decays_monotonically_in_norm() {
        let spline = SwingSpline::stationary([0.0; 3], 0.0, 10.0);
        let mut plant = TrackingPlant::new(PlantGains::default()).unwrap();
        plant.foot[2].pos = 0.05;
        let d = PlantDisturbance::default();
        let dt = plant.gains.dt;
        // Lyapunov-style energy for the damped oscillator declines.
        let energy = |p: &TrackingPlant| {
            plant_energy(p.foot[2].pos, p.foot[2].vel, p.gains.foot_kp[2])
        };
        let mut last = energy(&plant);
        for k in 0..2000 {
            plant.step(&spline, k as f64 * dt, 0.85, &d);
            let now = energy(&plant);
            assert!(now <= last + 1e-12);
            last = now;
        }
    }

    fn plant_energy(e: f64, edot: f64, kp: f64) -> f64 {
        kp * e * e + edot * edot
    }

    #[test]
    fn saturation_clamps_commands() {
        let spline = SwingSpline::stationary([0.0; 3], 0.0, 10.0);
        let mut plant = TrackingPlant::new(PlantGains::default()).unwrap();
        plant.foot[0].pos = 10.0; // enormous error
        let out = plant.step(&spline, 0.0, 0.85, &PlantDisturbance::default());
        assert_eq!(out.commands[0].abs(), plant.gains.saturation);
    }
}
