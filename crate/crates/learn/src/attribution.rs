//! Gradient-based feature attribution: saliency maps and integrated
//! gradients over any differentiable scalar target.

use strider_elevmap::GRID_SIZE;

use crate::features::{ObsFeatures, MAP_CELLS, VEC_DIM};
use crate::policy::PolicyNet;

/// A differentiable scalar function of a flat input vector.
pub trait DiffFn {
    fn input_dim(&self) -> usize;
    /// Returns (f(x), ∇f(x)).
    fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>);
}

/// Squared norm of the policy's action mean, as a function of the flat
/// input [elevation | grid_x | grid_y | vec].
pub struct PolicyActionNorm<'a> {
    pub policy: &'a PolicyNet,
}

impl PolicyActionNorm<'_> {
    pub fn flatten_input(features: &ObsFeatures) -> Vec<f64> {
        let (gx, gy) = strider_elevmap::EncodedObservationMap::ramps(0.025);
        let mut x = Vec::with_capacity(3 * MAP_CELLS + VEC_DIM);
        x.extend_from_slice(&features.elevation);
        x.extend_from_slice(&gx);
        x.extend_from_slice(&gy);
        x.extend_from_slice(&features.vec);
        x
    }
}

impl DiffFn for PolicyActionNorm<'_> {
    fn input_dim(&self) -> usize {
        3 * MAP_CELLS + VEC_DIM
    }

    fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let elev = &x[..MAP_CELLS];
        let gx = &x[MAP_CELLS..2 * MAP_CELLS];
        let gy = &x[2 * MAP_CELLS..3 * MAP_CELLS];
        let mut vec = [0.0; VEC_DIM];
        vec.copy_from_slice(&x[3 * MAP_CELLS..]);
        let (mean, cache) = self.policy.forward_full_channels(elev, gx, gy, &vec);
        let f = mean[(0, 0)].powi(2) + mean[(0, 1)].powi(2) + mean[(0, 2)].powi(2);
        let g_mean = ndarray::Array2::from_shape_vec(
            (1, 3),
            vec![2.0 * mean[(0, 0)], 2.0 * mean[(0, 1)], 2.0 * mean[(0, 2)]],
        )
        .unwrap();
        let (maps, g_vec) = self.policy.input_grads_full(&cache, &g_mean);
        let mut grad = Vec::with_capacity(self.input_dim());
        grad.extend_from_slice(&maps[0]);
        grad.extend_from_slice(&maps[1]);
        grad.extend_from_slice(&maps[2]);
        grad.extend_from_slice(&g_vec);
        (f, grad)
    }
}

/// Attribution over the observation layout, with the three map channels
/// aggregated per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    /// 64×64 per-cell attribution.
    pub map: Vec<f64>,
    pub vec: [f64; VEC_DIM],
    /// Raw per-input attribution (the flat layout of the target function).
    pub raw: Vec<f64>,
}

fn aggregate(raw: &[f64]) -> Attribution {
    let mut map = vec![0.0; MAP_CELLS];
    for c in 0..3 {
        for i in 0..MAP_CELLS {
            map[i] += raw[c * MAP_CELLS + i].abs();
        }
    }
    let mut vec = [0.0; VEC_DIM];
    for (k, v) in vec.iter_mut().enumerate() {
        *v = raw[3 * MAP_CELLS + k];
    }
    Attribution {
        map,
        vec,
        raw: raw.to_vec(),
    }
}

/// |∂f/∂x| per input element.
pub fn saliency(f: &dyn DiffFn, x: &[f64]) -> Attribution {
    assert_eq!(x.len(), f.input_dim());
    let (_, grad) = f.value_and_grad(x);
    let raw: Vec<f64> = grad.iter().map(|g| g.abs()).collect();
    if x.len() == 3 * MAP_CELLS + VEC_DIM {
        aggregate(&raw)
    } else {
        Attribution {
            map: Vec::new(),
            vec: [0.0; VEC_DIM],
            raw,
        }
    }
}

/// Left-Riemann path integral of gradients from `baseline` to `x`,
/// elementwise × (x − baseline). First-order quadrature: halving the step
/// count roughly doubles the completeness residual.
pub fn integrated_gradients(
    f: &dyn DiffFn,
    x: &[f64],
    baseline: &[f64],
    steps: usize,
) -> Attribution {
    assert!(steps >= 16, "integrated gradients needs >= 16 steps");
    assert_eq!(x.len(), f.input_dim());
    assert_eq!(baseline.len(), x.len());
    let n = x.len();
    let mut acc = vec![0.0; n];
    let mut point = vec![0.0; n];
    for k in 0..steps {
        let alpha = k as f64 / steps as f64;
        for i in 0..n {
            point[i] = baseline[i] + alpha * (x[i] - baseline[i]);
        }
        let (_, grad) = f.value_and_grad(&point);
        for i in 0..n {
            acc[i] += grad[i];
        }
    }
    let raw: Vec<f64> = (0..n)
        .map(|i| (x[i] - baseline[i]) * acc[i] / steps as f64)
        .collect();
    if n == 3 * MAP_CELLS + VEC_DIM {
        aggregate(&raw)
    } else {
        Attribution {
            map: Vec::new(),
            vec: [0.0; VEC_DIM],
            raw,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(x) = wᵀx (scalar linear model).
    struct LinearModel {
        w: Vec<f64>,
    }

    impl DiffFn for LinearModel {
        fn input_dim(&self) -> usize {
            self.w.len()
        }

        fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
            let f = self.w.iter().zip(x).map(|(w, x)| w * x).sum();
            (f, self.w.clone())
        }
    }

    #[test]
    fn linear_ig_attributions_are_exact() {
        let model = LinearModel {
            w: vec![0.5, -2.0, 3.0, 0.0],
        };
        let x = vec![1.0, 2.0, -1.0, 4.0];
        let baseline = vec![0.0; 4];
        let attr = integrated_gradients(&model, &x, &baseline, 16);
        for i in 0..4 {
            assert!((attr.raw[i] - model.w[i] * x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_saliency_is_the_weight_magnitude() {
        let model = LinearModel {
            w: vec![0.5, -2.0, 0.0],
        };
        let attr = saliency(&model, &[1.0, 1.0, 1.0]);
        assert_eq!(attr.raw, vec![0.5, 2.0, 0.0]);
    }

    /// f(x) = ‖Wx‖² for a small quadratic case with an analytic gradient.
    struct QuadModel {
        w: Vec<Vec<f64>>,
    }

    impl DiffFn for QuadModel {
        fn input_dim(&self) -> usize {
            self.w[0].len()
        }

        fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
            let y: Vec<f64> = self
                .w
                .iter()
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect();
            let f = y.iter().map(|v| v * v).sum();
            let mut grad = vec![0.0; x.len()];
            for (row, yi) in self.w.iter().zip(&y) {
                for (g, a) in grad.iter_mut().zip(row) {
                    *g += 2.0 * yi * a;
                }
            }
            (f, grad)
        }
    }

    #[test]
    fn ig_completeness_holds_for_a_smooth_model() {
        let model = QuadModel {
            w: vec![vec![0.2, -0.4, 0.1], vec![0.3, 0.5, -0.2]],
        };
        let x = vec![0.8, -0.3, 1.2];
        let baseline = vec![0.0; 3];
        let attr = integrated_gradients(&model, &x, &baseline, 256);
        let (fx, _) = model.value_and_grad(&x);
        let (f0, _) = model.value_and_grad(&baseline);
        let total: f64 = attr.raw.iter().sum();
        assert!(
            (total - (fx - f0)).abs() < 1e-3,
            "completeness residual {}",
            (total - (fx - f0)).abs()
        );
    }

    #[test]
    fn halving_steps_roughly_doubles_the_residual() {
        let model = QuadModel {
            w: vec![vec![0.4, -0.7], vec![0.3, 0.9]],
        };
        let x = vec![1.1, -0.9];
        let baseline = vec![0.0; 2];
        let (fx, _) = model.value_and_grad(&x);
        let (f0, _) = model.value_and_grad(&baseline);
        let residual = |steps: usize| {
            let attr = integrated_gradients(&model, &x, &baseline, steps);
            (attr.raw.iter().sum::<f64>() - (fx - f0)).abs()
        };
        let r256 = residual(256);
        let r128 = residual(128);
        let ratio = r128 / r256.max(1e-300);
        assert!(
            (1.0..=2.6).contains(&ratio),
            "first-order quadrature: residual ratio {ratio}"
        );
    }

    #[test]
    fn dead_input_gets_zero_attribution() {
        let model = LinearModel {
            w: vec![1.0, 0.0],
        };
        let attr = saliency(&model, &[0.7, 0.7]);
        assert_eq!(attr.raw[1], 0.0);
        let ig = integrated_gradients(&model, &[0.7, 0.7], &[0.0, 0.0], 16);
        assert_eq!(ig.raw[1], 0.0);
    }
}
