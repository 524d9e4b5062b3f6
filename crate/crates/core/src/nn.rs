//! Minimal trainable feedforward substrate with manual backpropagation.
//!
//! [`DenseNet`] is a stack of affine layers with an elementwise
//! nonlinearity, parameterized by one flat `Vec<f64>` so optimizers and
//! finite-difference checks can treat the whole network as a point in R^n.
//! All compute methods take the parameter vector explicitly; the copy a net
//! carries is just its current state.
//!
//! [`grad_check`] compares any analytic gradient against central finite
//! differences and is the single verification gate every trainable
//! component in this crate must pass.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("non-finite loss while probing parameter {index}")]
    NonFiniteProbe { index: usize },
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative as a function of the pre-activation. Relu uses the
    /// zero subgradient at the kink.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Fully connected network: `dims = [in, h1, ..., out]`. Hidden layers use
/// `hidden`, the last layer uses `output`. Parameters are laid out layer by
/// layer as `[W_1 row-major | b_1 | W_2 | b_2 | ...]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseNet {
    dims: Vec<usize>,
    hidden: Activation,
    output: Activation,
    params: Vec<f64>,
}

impl DenseNet {
    pub fn zeros(dims: Vec<usize>, hidden: Activation, output: Activation) -> Self {
        assert!(dims.len() >= 2, "need at least an input and an output dimension");
        let n = Self::param_count(&dims);
        Self { dims, hidden, output, params: vec![0.0; n] }
    }

    /// Xavier-uniform initialization from the given RNG.
    pub fn seeded<R: Rng>(dims: Vec<usize>, hidden: Activation, output: Activation, rng: &mut R) -> Self {
        let mut net = Self::zeros(dims, hidden, output);
        let mut offset = 0;
        for l in 0..net.layers() {
            let (fan_in, fan_out) = (net.dims[l], net.dims[l + 1]);
            let scale = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in &mut net.params[offset..offset + fan_in * fan_out] {
                *w = rng.gen_range(-scale..scale);
            }
            // biases stay zero
            offset += fan_in * fan_out + fan_out;
        }
        net
    }

    fn param_count(dims: &[usize]) -> usize {
        dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn set_params(&mut self, params: Vec<f64>) -> Result<(), NnError> {
        if params.len() != self.params.len() {
            return Err(NnError::ParamLength { expected: self.params.len(), got: params.len() });
        }
        self.params = params;
        Ok(())
    }

    fn activation_for(&self, layer: usize) -> Activation {
        if layer + 1 == self.layers() {
            self.output
        } else {
            self.hidden
        }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_with(&self.params, input)
    }

    pub fn forward_with(&self, params: &[f64], input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.input_dim(), "input dimension mismatch");
        let mut a = input.to_vec();
        let mut offset = 0;
        for l in 0..self.layers() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let act = self.activation_for(l);
            let w = &params[offset..offset + n_in * n_out];
            let b = &params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let mut next = vec![0.0; n_out];
            for (o, nx) in next.iter_mut().enumerate() {
                let row = &w[o * n_in..(o + 1) * n_in];
                let z = row.iter().zip(&a).map(|(wi, ai)| wi * ai).sum::<f64>() + b[o];
                *nx = act.apply(z);
            }
            a = next;
            offset += n_in * n_out + n_out;
        }
        a
    }

    /// Backprop for one input. `grad_out` is dL/d(output); parameter
    /// gradients are *added* into `param_grad`; the returned vector is
    /// dL/d(input).
    pub fn backward_with(
        &self,
        params: &[f64],
        input: &[f64],
        grad_out: &[f64],
        param_grad: &mut [f64],
    ) -> Vec<f64> {
        assert_eq!(param_grad.len(), self.params.len(), "param_grad length mismatch");
        assert_eq!(grad_out.len(), self.output_dim(), "grad_out dimension mismatch");

        // forward pass, caching pre-activations and layer inputs
        let mut layer_inputs: Vec<Vec<f64>> = Vec::with_capacity(self.layers());
        let mut pre_acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers());
        let mut a = input.to_vec();
        let mut offset = 0;
        let mut offsets = Vec::with_capacity(self.layers());
        for l in 0..self.layers() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            offsets.push(offset);
            let w = &params[offset..offset + n_in * n_out];
            let b = &params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            let mut z = vec![0.0; n_out];
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &w[o * n_in..(o + 1) * n_in];
                *zo = row.iter().zip(&a).map(|(wi, ai)| wi * ai).sum::<f64>() + b[o];
            }
            layer_inputs.push(a);
            a = z.iter().map(|&zo| self.activation_for(l).apply(zo)).collect();
            pre_acts.push(z);
            offset += n_in * n_out + n_out;
        }

        // backward pass
        let mut delta = grad_out.to_vec();
        for l in (0..self.layers()).rev() {
            let (n_in, n_out) = (self.dims[l], self.dims[l + 1]);
            let act = self.activation_for(l);
            let z = &pre_acts[l];
            let x = &layer_inputs[l];
            for (d, zo) in delta.iter_mut().zip(z) {
                *d *= act.derivative(*zo);
            }
            let off = offsets[l];
            let (w_grad, b_grad) = param_grad[off..off + n_in * n_out + n_out].split_at_mut(n_in * n_out);
            for (o, d) in delta.iter().enumerate() {
                for (i, xi) in x.iter().enumerate() {
                    w_grad[o * n_in + i] += d * xi;
                }
                b_grad[o] += d;
            }
            let w = &params[off..off + n_in * n_out];
            let mut prev = vec![0.0; n_in];
            for (o, d) in delta.iter().enumerate() {
                for (i, p) in prev.iter_mut().enumerate() {
                    *p += d * w[o * n_in + i];
                }
            }
            delta = prev;
        }
        delta
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub max_rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

const FD_STEP: f64 = 1e-5;
/// Components where both gradients are below this are inside the
/// finite-difference noise floor and are not compared.
const NOISE_FLOOR: f64 = 1e-7;

/// Compare `analytic` against central finite differences of `loss` at `at`.
pub fn grad_check<F>(loss: F, analytic: &[f64], at: &[f64], tol: f64) -> Result<GradCheckReport, NnError>
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(analytic.len(), at.len(), "gradient/point length mismatch");
    let mut probe = at.to_vec();
    let mut max_rel_err: f64 = 0.0;
    for i in 0..at.len() {
        probe[i] = at[i] + FD_STEP;
        let f_plus = loss(&probe);
        probe[i] = at[i] - FD_STEP;
        let f_minus = loss(&probe);
        probe[i] = at[i];
        if !f_plus.is_finite() || !f_minus.is_finite() {
            return Err(NnError::NonFiniteProbe { index: i });
        }
        let numeric = (f_plus - f_minus) / (2.0 * FD_STEP);
        let denom = analytic[i].abs().max(numeric.abs());
        if denom < NOISE_FLOOR {
            continue;
        }
        max_rel_err = max_rel_err.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(GradCheckReport { max_rel_err, tol, pass: max_rel_err < tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn squared_loss_grad(net: &DenseNet, params: &[f64], x: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
        let out = net.forward_with(params, x);
        let loss: f64 = out.iter().zip(target).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum();
        let grad_out: Vec<f64> = out.iter().zip(target).map(|(o, t)| o - t).collect();
        let mut grad = vec![0.0; net.n_params()];
        net.backward_with(params, x, &grad_out, &mut grad);
        (loss, grad)
    }

    #[test]
    fn linear_net_squared_loss_is_exact() {
        // central differences are exact on quadratics up to rounding
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = DenseNet::seeded(vec![3, 2], Activation::Identity, Activation::Identity, &mut rng);
        let x = [0.3, -1.2, 0.8];
        let target = [0.5, -0.25];
        let (_, grad) = squared_loss_grad(&net, net.params(), &x, &target);
        let report = grad_check(
            |p| {
                let out = net.forward_with(p, &x);
                out.iter().zip(&target).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
            },
            &grad,
            net.params(),
            1e-8,
        )
        .unwrap();
        assert!(report.pass, "max_rel_err = {}", report.max_rel_err);
    }

    #[test]
    fn two_layer_relu_net_passes_fd_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = DenseNet::seeded(vec![4, 8, 3], Activation::Relu, Activation::Identity, &mut rng);
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let target = [0.1, -0.4, 0.9];
        // nudge biases off zero so no unit sits exactly on the relu kink
        let mut params = net.params().to_vec();
        for p in &mut params {
            if *p == 0.0 {
                *p = rng.gen_range(0.01..0.05);
            }
        }
        let (_, grad) = squared_loss_grad(&net, &params, &x, &target);
        let report = grad_check(
            |p| {
                let out = net.forward_with(p, &x);
                out.iter().zip(&target).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
            },
            &grad,
            &params,
            1e-4,
        )
        .unwrap();
        assert!(report.pass, "max_rel_err = {}", report.max_rel_err);
    }

    #[test]
    fn corrupted_gradient_is_caught() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = DenseNet::seeded(vec![2, 2], Activation::Identity, Activation::Identity, &mut rng);
        let x = [1.0, -0.5];
        let target = [0.0, 0.0];
        let (_, mut grad) = squared_loss_grad(&net, net.params(), &x, &target);
        grad[0] += 0.5;
        let report = grad_check(
            |p| {
                let out = net.forward_with(p, &x);
                out.iter().zip(&target).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
            },
            &grad,
            net.params(),
            1e-4,
        )
        .unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = DenseNet::seeded(vec![3, 5, 2], Activation::Relu, Activation::Identity, &mut rng);
        let x = [0.4, 0.9, -0.7];
        let grad_out = [1.0, -2.0];
        let mut pg = vec![0.0; net.n_params()];
        let input_grad = net.backward_with(net.params(), &x, &grad_out, &mut pg);

        let loss = |xin: &[f64]| -> f64 {
            let out = net.forward(xin);
            out.iter().zip(&grad_out).map(|(o, g)| o * g).sum()
        };
        let report = grad_check(loss, &input_grad, &x, 1e-5).unwrap();
        assert!(report.pass, "max_rel_err = {}", report.max_rel_err);
    }

    #[test]
    fn param_length_enforced() {
        let mut net = DenseNet::zeros(vec![2, 1], Activation::Identity, Activation::Identity);
        assert!(matches!(net.set_params(vec![0.0; 2]), Err(NnError::ParamLength { .. })));
        assert!(net.set_params(vec![0.1, 0.2, 0.3]).is_ok());
    }
}
