//! Minimal dense layers with hand-derived backward passes over ndarray.
//! All parameters live in plain arrays; `FlatParams` exposes them as one
//! flat vector for the optimizer and finite-difference checks.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;

/// Uniform access to a module's parameters and gradients as flat slices.
pub trait FlatParams {
    fn param_count(&self) -> usize;
    fn write_params(&self, out: &mut Vec<f64>);
    fn read_params(&mut self, data: &[f64], cursor: &mut usize);
    fn write_grads(&self, out: &mut Vec<f64>);
    fn zero_grads(&mut self);

    fn params_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_count());
        self.write_params(&mut v);
        v
    }

    fn grads_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.param_count());
        self.write_grads(&mut v);
        v
    }

    fn set_params(&mut self, data: &[f64]) {
        let mut cursor = 0;
        self.read_params(data, &mut cursor);
        assert_eq!(cursor, data.len(), "parameter vector length mismatch");
    }
}

/// Fully connected layer y = x·Wᵀ + b.
#[derive(Debug, Clone)]
pub struct Linear {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub gw: Array2<f64>,
    pub gb: Array1<f64>,
}

impl Linear {
    pub fn new<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let scale = 1.0 / (in_dim as f64).sqrt();
        let w = Array2::from_shape_fn((out_dim, in_dim), |_| rng.gen_range(-scale..scale));
        Self {
            b: Array1::zeros(out_dim),
            gw: Array2::zeros(w.dim()),
            gb: Array1::zeros(out_dim),
            w,
        }
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.w.t()) + &self.b
    }

    /// Accumulates parameter gradients; returns the input gradient.
    pub fn backward(&mut self, x: &Array2<f64>, gy: &Array2<f64>) -> Array2<f64> {
        self.gw += &gy.t().dot(x);
        self.gb += &gy.sum_axis(Axis(0));
        gy.dot(&self.w)
    }
}

impl FlatParams for Linear {
    fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        out.extend(self.w.iter());
        out.extend(self.b.iter());
    }

    fn read_params(&mut self, data: &[f64], cursor: &mut usize) {
        for v in self.w.iter_mut() {
            *v = data[*cursor];
            *cursor += 1;
        }
        for v in self.b.iter_mut() {
            *v = data[*cursor];
            *cursor += 1;
        }
    }

    fn write_grads(&self, out: &mut Vec<f64>) {
        out.extend(self.gw.iter());
        out.extend(self.gb.iter());
    }

    fn zero_grads(&mut self) {
        self.gw.fill(0.0);
        self.gb.fill(0.0);
    }
}

/// Elementwise tanh; returns activations for reuse in the backward pass.
pub fn tanh_forward(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(f64::tanh)
}

/// gx = gy ⊙ (1 − y²) with y the cached tanh output.
pub fn tanh_backward(y: &Array2<f64>, gy: &Array2<f64>) -> Array2<f64> {
    gy * &y.mapv(|v| 1.0 - v * v)
}

/// Shared per-patch linear map: a strided (kernel = stride) convolution
/// over non-overlapping patches, expressed as one matmul on the
/// patch-flattened input.
///
/// Input layout per patch: `channels` blocks of `patch_len` values. The
/// trailing channels of the walking observation are constant offset ramps,
/// so the fast path takes only the varying leading channels and adds a
/// cached constant contribution (refreshed after every parameter update).
#[derive(Debug, Clone)]
pub struct PatchLinear {
    pub inner: Linear,
    pub patches: usize,
    pub patch_len: usize,
    pub channels: usize,
    pub var_channels: usize,
    /// (patches, out): inner(w)·const_channels + b, cached.
    pub const_out: Array2<f64>,
    /// (patches, patch_len·(channels − var_channels)): the constant tail.
    const_input: Array2<f64>,
}

impl PatchLinear {
    /// `const_tail[p]` holds the constant trailing-channel inputs of patch
    /// p, concatenated channel-major.
    pub fn new<R: Rng>(
        patches: usize,
        patch_len: usize,
        channels: usize,
        var_channels: usize,
        out_dim: usize,
        const_tail: Array2<f64>,
        rng: &mut R,
    ) -> Self {
        assert!(var_channels <= channels);
        assert_eq!(const_tail.dim(), (patches, patch_len * (channels - var_channels)));
        let inner = Linear::new(patch_len * channels, out_dim, rng);
        let mut layer = Self {
            inner,
            patches,
            patch_len,
            channels,
            var_channels,
            const_out: Array2::zeros((patches, out_dim)),
            const_input: const_tail,
        };
        layer.refresh_const();
        layer
    }

    /// Recompute the cached constant contribution (call after parameter
    /// updates).
    pub fn refresh_const(&mut self) {
        let var_cols = self.patch_len * self.var_channels;
        let w_tail = self.inner.w.slice(ndarray::s![.., var_cols..]);
        self.const_out = self.const_input.dot(&w_tail.t()) + &self.inner.b;
    }

    pub fn out_dim(&self) -> usize {
        self.inner.b.len()
    }

    /// Fast path: x is (N·patches, patch_len·var_channels), patch-major
    /// within each sample. Output (N·patches, out).
    pub fn forward_var(&self, x: &Array2<f64>) -> Array2<f64> {
        let var_cols = self.patch_len * self.var_channels;
        let w_head = self.inner.w.slice(ndarray::s![.., ..var_cols]);
        let mut y = x.dot(&w_head.t());
        let n_rows = y.nrows();
        for (row_idx, mut row) in y.axis_iter_mut(Axis(0)).enumerate() {
            let p = row_idx % self.patches;
            row += &self.const_out.row(p);
            let _ = n_rows;
        }
        y
    }

    /// Backward of the fast path. Gradients flow to the head weights from
    /// the varying inputs and to the tail weights through the cached
    /// constants.
    pub fn backward_var(&mut self, x: &Array2<f64>, gy: &Array2<f64>) -> Array2<f64> {
        let var_cols = self.patch_len * self.var_channels;
        {
            let mut gw_head = self.inner.gw.slice_mut(ndarray::s![.., ..var_cols]);
            gw_head += &gy.t().dot(x);
        }
        // Tail gradient: each row's patch constants act as inputs.
        let tail_cols = self.const_input.ncols();
        if tail_cols > 0 {
            // Sum gy rows per patch index, then outer with const inputs.
            let out_dim = self.out_dim();
            let mut per_patch_gy = Array2::<f64>::zeros((self.patches, out_dim));
            for (row_idx, row) in gy.axis_iter(Axis(0)).enumerate() {
                let p = row_idx % self.patches;
                let mut acc = per_patch_gy.row_mut(p);
                acc += &row;
            }
            let mut gw_tail = self.inner.gw.slice_mut(ndarray::s![.., var_cols..]);
            gw_tail += &per_patch_gy.t().dot(&self.const_input);
        }
        self.inner.gb += &gy.sum_axis(Axis(0));
        let w_head = self.inner.w.slice(ndarray::s![.., ..var_cols]);
        gy.dot(&w_head)
    }

    /// General path: x is (N·patches, patch_len·channels) with every
    /// channel explicit (attribution uses this).
    pub fn forward_full(&self, x: &Array2<f64>) -> Array2<f64> {
        self.inner.forward(x)
    }

    pub fn input_grad_full(&self, gy: &Array2<f64>) -> Array2<f64> {
        gy.dot(&self.inner.w)
    }
}

impl FlatParams for PatchLinear {
    fn param_count(&self) -> usize {
        self.inner.param_count()
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        self.inner.write_params(out)
    }

    fn read_params(&mut self, data: &[f64], cursor: &mut usize) {
        self.inner.read_params(data, cursor);
        self.refresh_const();
    }

    fn write_grads(&self, out: &mut Vec<f64>) {
        self.inner.write_grads(out)
    }

    fn zero_grads(&mut self) {
        self.inner.zero_grads()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut layer = Linear::new(5, 4, &mut rng);
        let x = Array2::from_shape_fn((3, 5), |_| rng.gen_range(-1.0..1.0));
        let target = Array2::from_shape_fn((3, 4), |_| rng.gen_range(-1.0..1.0));

        // Loss: 0.5·‖y − t‖².
        let loss_of = |layer: &Linear| {
            let y = layer.forward(&x);
            0.5 * (&y - &target).mapv(|v| v * v).sum()
        };
        let y = layer.forward(&x);
        let gy = &y - &target;
        layer.zero_grads();
        let gx = layer.backward(&x, &gy);

        let params = layer.params_flat();
        let grads = layer.grads_flat();
        let h = 1e-5;
        for idx in 0..params.len() {
            let mut p = params.clone();
            p[idx] += h;
            layer.set_params(&p);
            let plus = loss_of(&layer);
            p[idx] -= 2.0 * h;
            layer.set_params(&p);
            let minus = loss_of(&layer);
            p[idx] += h;
            layer.set_params(&p);
            let fd = (plus - minus) / (2.0 * h);
            let rel = (grads[idx] - fd).abs() / fd.abs().max(1e-6);
            assert!(rel < 1e-4, "param {idx}: analytic {} fd {fd}", grads[idx]);
        }

        // Input gradient via FD on one element.
        let mut x2 = x.clone();
        x2[(1, 2)] += h;
        let plus = {
            let y = layer.forward(&x2);
            0.5 * (&y - &target).mapv(|v| v * v).sum()
        };
        x2[(1, 2)] -= 2.0 * h;
        let minus = {
            let y = layer.forward(&x2);
            0.5 * (&y - &target).mapv(|v| v * v).sum()
        };
        let fd = (plus - minus) / (2.0 * h);
        assert!((gx[(1, 2)] - fd).abs() / fd.abs().max(1e-6) < 1e-4);
    }

    #[test]
    fn tanh_backward_matches_derivative() {
        let x = Array2::from_shape_vec((1, 3), vec![0.3, -1.2, 0.0]).unwrap();
        let y = tanh_forward(&x);
        let gy = Array2::ones((1, 3));
        let gx = tanh_backward(&y, &gy);
        for i in 0..3 {
            let d = 1.0 - x[(0, i)].tanh().powi(2);
            assert!((gx[(0, i)] - d).abs() < 1e-12);
        }
    }

    #[test]
    fn patch_linear_fast_path_equals_full_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let patches = 4;
        let patch_len = 3;
        let const_tail =
            Array2::from_shape_fn((patches, patch_len * 2), |_| rng.gen_range(-1.0..1.0));
        let layer = PatchLinear::new(patches, patch_len, 3, 1, 5, const_tail.clone(), &mut rng);
        let n = 2;
        let x_var = Array2::from_shape_fn((n * patches, patch_len), |_| rng.gen_range(-1.0..1.0));
        let fast = layer.forward_var(&x_var);

        // Assemble the full input: varying head + constant tail per patch.
        let mut x_full = Array2::zeros((n * patches, patch_len * 3));
        for row in 0..n * patches {
            let p = row % patches;
            for k in 0..patch_len {
                x_full[(row, k)] = x_var[(row, k)];
            }
            for k in 0..patch_len * 2 {
                x_full[(row, patch_len + k)] = const_tail[(p, k)];
            }
        }
        let full = layer.forward_full(&x_full);
        for (a, b) in fast.iter().zip(full.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn patch_linear_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let patches = 3;
        let patch_len = 2;
        let const_tail =
            Array2::from_shape_fn((patches, patch_len), |_| rng.gen_range(-1.0..1.0));
        let mut layer = PatchLinear::new(patches, patch_len, 2, 1, 4, const_tail, &mut rng);
        let x = Array2::from_shape_fn((2 * patches, patch_len), |_| rng.gen_range(-1.0..1.0));
        let target = Array2::from_shape_fn((2 * patches, 4), |_| rng.gen_range(-1.0..1.0));

        let loss_of = |layer: &PatchLinear| {
            let y = layer.forward_var(&x);
            0.5 * (&y - &target).mapv(|v| v * v).sum()
        };
        let y = layer.forward_var(&x);
        let gy = &y - &target;
        layer.zero_grads();
        layer.backward_var(&x, &gy);

        let params = layer.params_flat();
        let grads = layer.grads_flat();
        let h = 1e-5;
        for idx in 0..params.len() {
            let mut p = params.clone();
            p[idx] += h;
            layer.set_params(&p);
            let plus = loss_of(&layer);
            p[idx] -= 2.0 * h;
            layer.set_params(&p);
            let minus = loss_of(&layer);
            p[idx] += h;
            layer.set_params(&p);
            let fd = (plus - minus) / (2.0 * h);
            let rel = (grads[idx] - fd).abs() / fd.abs().max(1e-6);
            assert!(rel < 1e-4, "param {idx}: analytic {} fd {fd}", grads[idx]);
        }
    }
}
