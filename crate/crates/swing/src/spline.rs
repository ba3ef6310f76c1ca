use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::error::SwingError;

/// Objective weights for the spline QP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplineWeights {
    /// Weight on ∫‖p̈‖² dt.
    pub acceleration: f64,
    /// Weight on ‖p(t_mid) − mid_target‖².
    pub midpoint: f64,
    /// Horizons shorter than this are refused (the caller holds the
    /// previous spline).
    pub min_horizon: f64,
    /// Default apex clearance added above max(start_z, target_z) when the
    /// caller derives the mid target.
    pub clearance: f64,
}

impl Default for SplineWeights {
    fn default() -> Self {
        Self {
            acceleration: 1.0,
            midpoint: 1.0e4,
            min_horizon: 0.010,
            clearance: 0.08,
        }
    }
}

impl SplineWeights {
    /// Midpoint target used when none is supplied: XY midpoint of the
    /// endpoints, Z raised above both for ground clearance.
    pub fn default_mid_target(&self, start: [f64; 3], target: [f64; 3]) -> [f64; 3] {
        [
            0.5 * (start[0] + target[0]),
            0.5 * (start[1] + target[1]),
            start[2].max(target[2]) + self.clearance,
        ]
    }
}

/// Boundary state at the plan time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryState {
    pub pos: [f64; 3],
    pub vel: [f64; 3],
    pub acc: [f64; 3],
}

/// Per-axis quintic polynomials over [t0, t_td] (coefficients in the local
/// time τ = t − t0). `start` and `target` record the commanded endpoints
/// for replan short-circuits and tracking-error normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwingSpline {
    pub coeffs: [[f64; 6]; 3],
    pub t0: f64,
    pub t_td: f64,
    pub start: [f64; 3],
    pub target: [f64; 3],
}

impl SwingSpline {
    /// A constant spline that sits at one point (used for held feet).
    pub fn stationary(pos: [f64; 3], t0: f64, t_td: f64) -> Self {
        let mut coeffs = [[0.0; 6]; 3];
        for (axis, c) in coeffs.iter_mut().enumerate() {
            c[0] = pos[axis];
        }
        Self {
            coeffs,
            t0,
            t_td,
            start: pos,
            target: pos,
        }
    }

    pub fn duration(&self) -> f64 {
        self.t_td - self.t0
    }

    pub fn position(&self, t: f64) -> [f64; 3] {
        let tau = t - self.t0;
        std::array::from_fn(|a| poly_eval(&self.coeffs[a], tau))
    }

    pub fn velocity(&self, t: f64) -> [f64; 3] {
        let tau = t - self.t0;
        std::array::from_fn(|a| poly_eval_d1(&self.coeffs[a], tau))
    }

    pub fn acceleration(&self, t: f64) -> [f64; 3] {
        let tau = t - self.t0;
        std::array::from_fn(|a| poly_eval_d2(&self.coeffs[a], tau))
    }

    pub fn boundary_state(&self, t: f64) -> BoundaryState {
        BoundaryState {
            pos: self.position(t),
            vel: self.velocity(t),
            acc: self.acceleration(t),
        }
    }

    /// Realized objective value for given weights and mid target.
    pub fn objective(&self, weights: &SplineWeights, mid_target: [f64; 3]) -> f64 {
        let h = self.duration();
        let t_mid = self.t0 + 0.5 * h;
        let mid = self.position(t_mid);
        let mut acc_energy = 0.0;
        for axis in 0..3 {
            let c = &self.coeffs[axis];
            for j in 2..6 {
                for k in 2..6 {
                    let jj = (j * (j - 1)) as f64;
                    let kk = (k * (k - 1)) as f64;
                    acc_energy += c[j] * c[k] * jj * kk * h.powi((j + k - 3) as i32)
                        / (j + k - 3) as f64;
                }
            }
        }
        let mid_err: f64 = (0..3).map(|a| (mid[a] - mid_target[a]).powi(2)).sum();
        weights.acceleration * acc_energy + weights.midpoint * mid_err
    }

    /// Mirror about the y = 0 plane.
    pub fn mirrored_y(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs[1] {
            *c = -*c;
        }
        out.start[1] = -out.start[1];
        out.target[1] = -out.target[1];
        out
    }

    /// Commanded swing displacement, the tracking-error normalizer.
    pub fn commanded_displacement(&self) -> f64 {
        (0..3)
            .map(|a| (self.target[a] - self.start[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn poly_eval(c: &[f64; 6], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

fn poly_eval_d1(c: &[f64; 6], t: f64) -> f64 {
    (1..6)
        .rev()
        .fold(0.0, |acc, k| acc * t + k as f64 * c[k])
}

fn poly_eval_d2(c: &[f64; 6], t: f64) -> f64 {
    (2..6)
        .rev()
        .fold(0.0, |acc, k| acc * t + (k * (k - 1)) as f64 * c[k])
}

/// Solve the per-axis KKT system: minimize
/// w_acc·∫p̈² dτ + w_mid·(p(h/2) − mid)² subject to p(0), ṗ(0), p̈(0) and
/// p(h) constraints.
pub fn plan_spline(
    bc: &BoundaryState,
    target: [f64; 3],
    mid_target: [f64; 3],
    weights: &SplineWeights,
    t_now: f64,
    t_td: f64,
) -> Result<SwingSpline, SwingError> {
    let h = t_td - t_now;
    if !(h.is_finite() && h >= weights.min_horizon) {
        return Err(SwingError::HorizonTooShort(h, weights.min_horizon));
    }
    if weights.acceleration <= 0.0 || weights.midpoint < 0.0 {
        return Err(SwingError::Parameter(
            "acceleration weight must be positive, midpoint weight non-negative".into(),
        ));
    }
    let t_mid = 0.5 * h;
    let phi: [f64; 6] = std::array::from_fn(|k| t_mid.powi(k as i32));

    // Hessian: 2·(w_acc·Q_acc + w_mid·φφᵀ).
    let mut q = SMatrix::<f64, 6, 6>::zeros();
    for j in 2..6 {
        for k in 2..6 {
            let jj = (j * (j - 1)) as f64;
            let kk = (k * (k - 1)) as f64;
            q[(j, k)] = weights.acceleration * jj * kk * h.powi((j + k - 3) as i32)
                / (j + k - 3) as f64;
        }
    }
    for j in 0..6 {
        for k in 0..6 {
            q[(j, k)] += weights.midpoint * phi[j] * phi[k];
        }
    }

    // Constraint rows: p(0), ṗ(0), p̈(0), p(h).
    let mut kkt = SMatrix::<f64, 10, 10>::zeros();
    for j in 0..6 {
        for k in 0..6 {
            kkt[(j, k)] = 2.0 * q[(j, k)];
        }
    }
    let mut a = SMatrix::<f64, 4, 6>::zeros();
    a[(0, 0)] = 1.0;
    a[(1, 1)] = 1.0;
    a[(2, 2)] = 2.0;
    for k in 0..6 {
        a[(3, k)] = h.powi(k as i32);
    }
    for r in 0..4 {
        for k in 0..6 {
            kkt[(6 + r, k)] = a[(r, k)];
            kkt[(k, 6 + r)] = a[(r, k)];
        }
    }
    let lu = kkt.lu();

    let mut coeffs = [[0.0; 6]; 3];
    for axis in 0..3 {
        let mut rhs = SMatrix::<f64, 10, 1>::zeros();
        for j in 0..6 {
            rhs[j] = 2.0 * weights.midpoint * mid_target[axis] * phi[j];
        }
        rhs[6] = bc.pos[axis];
        rhs[7] = bc.vel[axis];
        rhs[8] = bc.acc[axis];
        rhs[9] = target[axis];
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| SwingError::Numerical("singular KKT system".into()))?;
        for k in 0..6 {
            coeffs[axis][k] = sol[k];
        }
    }
    Ok(SwingSpline {
        coeffs,
        t0: t_now,
        t_td,
        start: bc.pos,
        target,
    })
}

/// Replan toward a new target, splicing C²-continuously at `t_now`. An
/// unchanged target keeps the current spline (nothing to recompute), so
/// the trajectory is bit-identical in that case.
pub fn replan_on_new_target(
    current: &SwingSpline,
    t_now: f64,
    new_target: [f64; 3],
    mid_target: [f64; 3],
    weights: &SplineWeights,
) -> Result<SwingSpline, SwingError> {
    if t_now < current.t0 || t_now > current.t_td {
        return Err(SwingError::OutsideInterval(t_now, current.t0, current.t_td));
    }
    if new_target == current.target {
        return Ok(current.clone());
    }
    let bc = current.boundary_state(t_now);
    let mut spline = plan_spline(&bc, new_target, mid_target, weights, t_now, current.t_td)?;
    // The swing's logical start point survives replans.
    spline.start = current.start;
    Ok(spline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_spline_for_coincident_boundary_and_target() {
        let p = [0.2, -0.1, 0.05];
        let bc = BoundaryState {
            pos: p,
            ..Default::default()
        };
        let w = SplineWeights::default();
        let spline = plan_spline(&bc, p, p, &w, 0.0, 0.3).unwrap();
        for t in [0.0, 0.1, 0.22, 0.3] {
            let pos = spline.position(t);
            for a in 0..3 {
                assert_relative_eq!(pos[a], p[a], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn boundary_residuals_below_1e9_for_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let w = SplineWeights::default();
        for _ in 0..200 {
            let bc = BoundaryState {
                pos: std::array::from_fn(|_| rng.gen_range(-0.3..0.3)),
                vel: std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
                acc: std::array::from_fn(|_| rng.gen_range(-5.0..5.0)),
            };
            let target: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.4..0.4));
            let mid = w.default_mid_target(bc.pos, target);
            let t0 = rng.gen_range(0.0..0.1);
            let t_td = t0 + rng.gen_range(0.05..0.4);
            let s = plan_spline(&bc, target, mid, &w, t0, t_td).unwrap();
            let p0 = s.position(t0);
            let v0 = s.velocity(t0);
            let a0 = s.acceleration(t0);
            let pt = s.position(t_td);
            for a in 0..3 {
                assert!((p0[a] - bc.pos[a]).abs() < 1e-9);
                assert!((v0[a] - bc.vel[a]).abs() < 1e-9);
                assert!((a0[a] - bc.acc[a]).abs() < 1e-9);
                assert!((pt[a] - target[a]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dominant_midpoint_weight_reaches_mid_target() {
        let bc = BoundaryState::default();
        let target = [0.3, 0.0, 0.0];
        let mid = [0.15, 0.0, 0.08];
        let w = SplineWeights {
            acceleration: 1.0,
            midpoint: 1e6,
            ..SplineWeights::default()
        };
        let s = plan_spline(&bc, target, mid, &w, 0.0, 0.3).unwrap();
        let z_mid = s.position(0.15)[2];
        assert!((z_mid - 0.08).abs() < 1e-3, "z(t_mid) = {z_mid}");
    }

    #[test]
    fn too_short_horizon_is_refused() {
        let w = SplineWeights::default();
        let err = plan_spline(
            &BoundaryState::default(),
            [0.1, 0.0, 0.0],
            [0.05, 0.0, 0.08],
            &w,
            0.0,
            0.005,
        );
        assert!(matches!(err, Err(SwingError::HorizonTooShort(_, _))));
    }

    #[test]
    fn replan_same_target_leaves_trajectory_unchanged() {
        let w = SplineWeights::default();
        let bc = BoundaryState::default();
        let target = [0.3, 0.1, 0.0];
        let mid = w.default_mid_target(bc.pos, target);
        let s = plan_spline(&bc, target, mid, &w, 0.0, 0.3).unwrap();
        let r = replan_on_new_target(&s, 0.12, target, mid, &w).unwrap();
        for t in [0.12, 0.2, 0.25, 0.3] {
            let a = s.position(t);
            let b = r.position(t);
            for axis in 0..3 {
                assert!((a[axis] - b[axis]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn replan_is_c2_at_the_splice() {
        let w = SplineWeights::default();
        let bc = BoundaryState::default();
        let target = [0.3, 0.1, 0.0];
        let mid = w.default_mid_target(bc.pos, target);
        let s = plan_spline(&bc, target, mid, &w, 0.0, 0.3).unwrap();
        let new_target = [0.32, 0.1, 0.0];
        let r = replan_on_new_target(&s, 0.15, new_target, mid, &w).unwrap();
        let (p_a, v_a, a_a) = (s.position(0.15), s.velocity(0.15), s.acceleration(0.15));
        let (p_b, v_b, a_b) = (r.position(0.15), r.velocity(0.15), r.acceleration(0.15));
        for axis in 0..3 {
            assert!((p_a[axis] - p_b[axis]).abs() < 1e-9);
            assert!((v_a[axis] - v_b[axis]).abs() < 1e-9);
            assert!((a_a[axis] - a_b[axis]).abs() < 1e-9);
        }
        let end = r.position(0.3);
        for axis in 0..3 {
            assert!((end[axis] - new_target[axis]).abs() < 1e-9);
        }
    }

    #[test]
    fn flat_ground_swing_never_scuffs() {
        let w = SplineWeights::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let bc = BoundaryState {
                pos: [0.0, 0.0, 0.0],
                ..Default::default()
            };
            let target = [
                rng.gen_range(-0.6..0.6),
                rng.gen_range(0.05..0.5),
                0.0,
            ];
            let mid = w.default_mid_target(bc.pos, target);
            let s = plan_spline(&bc, target, mid, &w, 0.0, 0.3).unwrap();
            for k in 0..=300 {
                let t = 0.3 * k as f64 / 300.0;
                assert!(
                    s.position(t)[2] >= -1e-9,
                    "scuff at t={t}: z={}",
                    s.position(t)[2]
                );
            }
        }
    }
}
