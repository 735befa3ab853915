//! Dense feedforward networks with hand-rolled forward and backward passes.
//!
//! Only the two fixed architectures the models need are supported: a stack
//! of fully connected layers with swish, relu or linear activations.
//! Parameters live in one flat `Vec<f64>` (row-major weights, then biases,
//! per layer) so the optimizer and checkpointing can treat them as a single
//! vector; per-layer views are exposed through [`DenseNet::layer`].

use crate::error::{FeefError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Swish,
    Relu,
    Linear,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Swish => x * sigmoid(x),
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Linear => x,
        }
    }

    /// Derivative at pre-activation `x`.
    #[inline]
    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Swish => {
                let s = sigmoid(x);
                s + x * s * (1.0 - s)
            }
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Dot product with eight independent accumulator lanes. `chunks_exact`
/// proves the slice lengths to the optimizer (no bounds checks in the
/// loop), fused multiply-adds halve the FP work, and the fixed lane
/// structure keeps the summation order, and so the result, independent of
/// optimization level and thread count.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let b = &b[..a.len()];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let mut rest = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        rest = x.mul_add(*y, rest);
    }
    let mut s = [0.0f64; 8];
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            s[k] = x[k].mul_add(y[k], s[k]);
        }
    }
    reduce8(&s) + rest
}

#[inline]
fn reduce8(s: &[f64; 8]) -> f64 {
    ((s[0] + s[1]) + (s[2] + s[3])) + ((s[4] + s[5]) + (s[6] + s[7]))
}

/// `pre[o] = Σ_i w[o·in+i]·x[i] + b[o]`, four output rows per pass. Sharing
/// one sweep of `x` across four independent accumulator sets hides FP add
/// latency; each row keeps the exact lane structure of [`dot`], so `pre[o]`
/// equals `dot(row_o, x) + b[o]` bit for bit.
fn matvec_bias(w: &[f64], b: &[f64], x: &[f64], pre: &mut [f64]) {
    let in_dim = x.len();
    let out_dim = pre.len();
    debug_assert_eq!(w.len(), in_dim * out_dim);
    debug_assert_eq!(b.len(), out_dim);
    let x8 = x.chunks_exact(8);
    let x_rem = x8.remainder();
    let full = out_dim / 4 * 4;
    let mut o = 0;
    while o < full {
        let rows = &w[o * in_dim..(o + 4) * in_dim];
        let (r0, rest) = rows.split_at(in_dim);
        let (r1, rest) = rest.split_at(in_dim);
        let (r2, r3) = rest.split_at(in_dim);
        let c0 = r0.chunks_exact(8);
        let c1 = r1.chunks_exact(8);
        let c2 = r2.chunks_exact(8);
        let c3 = r3.chunks_exact(8);
        let (rem0, rem1, rem2, rem3) =
            (c0.remainder(), c1.remainder(), c2.remainder(), c3.remainder());
        let (mut s0, mut s1, mut s2, mut s3) =
            ([0.0f64; 8], [0.0f64; 8], [0.0f64; 8], [0.0f64; 8]);
        for ((((xv, a), bv), cv), dv) in x8.clone().zip(c0).zip(c1).zip(c2).zip(c3) {
            for k in 0..8 {
                s0[k] = a[k].mul_add(xv[k], s0[k]);
                s1[k] = bv[k].mul_add(xv[k], s1[k]);
                s2[k] = cv[k].mul_add(xv[k], s2[k]);
                s3[k] = dv[k].mul_add(xv[k], s3[k]);
            }
        }
        let (mut t0, mut t1, mut t2, mut t3) = (0.0, 0.0, 0.0, 0.0);
        for (k, xv) in x_rem.iter().enumerate() {
            t0 = rem0[k].mul_add(*xv, t0);
            t1 = rem1[k].mul_add(*xv, t1);
            t2 = rem2[k].mul_add(*xv, t2);
            t3 = rem3[k].mul_add(*xv, t3);
        }
        pre[o] = reduce8(&s0) + t0 + b[o];
        pre[o + 1] = reduce8(&s1) + t1 + b[o + 1];
        pre[o + 2] = reduce8(&s2) + t2 + b[o + 2];
        pre[o + 3] = reduce8(&s3) + t3 + b[o + 3];
        o += 4;
    }
    while o < out_dim {
        pre[o] = dot(&w[o * in_dim..(o + 1) * in_dim], x) + b[o];
        o += 1;
    }
}

#[derive(Debug, Clone, Copy)]
struct LayerSpec {
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    w_off: usize,
    b_off: usize,
}

/// Read-only view of one layer's parameters.
pub struct LayerView<'a> {
    pub weights: &'a [f64],
    pub biases: &'a [f64],
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

#[derive(Debug, Clone)]
pub struct DenseNet {
    specs: Vec<LayerSpec>,
    params: Vec<f64>,
}

/// Reusable buffers for a forward pass (activations per layer) and the
/// pre-activations needed by backprop. One scratch per thread; nothing in
/// the net itself is mutated by inference. A scratch adapts itself to
/// whatever net it is handed, so one instance can serve several nets.
#[derive(Debug, Default, Clone)]
pub struct NetScratch {
    /// Layer dims of the net the buffers are currently sized for.
    dims: Vec<usize>,
    /// acts[0] is the input; acts[k+1] the output of layer k.
    acts: Vec<Vec<f64>>,
    /// pre[k] is layer k's pre-activation.
    pre: Vec<Vec<f64>>,
    /// delta buffers for backprop.
    delta: Vec<f64>,
    delta_next: Vec<f64>,
}

impl DenseNet {
    /// Build a net with the given layer dimensions, e.g. `[3, 64, 64, 4]`.
    /// Hidden layers use `hidden`, the last layer is linear. Weights are
    /// fan-in-scaled uniform (±sqrt(1/fan_in)), biases zero.
    pub fn new(dims: &[usize], hidden: Activation, rng: &mut impl rand::Rng) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        assert!(dims.iter().all(|&d| d > 0), "layer dims must be positive");
        let mut specs = Vec::with_capacity(dims.len() - 1);
        let mut off = 0;
        for k in 0..dims.len() - 1 {
            let (in_dim, out_dim) = (dims[k], dims[k + 1]);
            let activation = if k + 1 == dims.len() - 1 {
                Activation::Linear
            } else {
                hidden
            };
            specs.push(LayerSpec {
                in_dim,
                out_dim,
                activation,
                w_off: off,
                b_off: off + in_dim * out_dim,
            });
            off += in_dim * out_dim + out_dim;
        }
        let mut params = vec![0.0; off];
        for spec in &specs {
            let bound = (1.0 / spec.in_dim as f64).sqrt();
            for w in &mut params[spec.w_off..spec.w_off + spec.in_dim * spec.out_dim] {
                *w = rng.gen_range(-bound..bound);
            }
            // biases stay zero
        }
        Self { specs, params }
    }

    /// A net with every weight and bias zero (useful for fixtures).
    pub fn zeros(dims: &[usize], hidden: Activation) -> Self {
        let mut rng = crate::rng::rng_from_seed(0);
        let mut net = Self::new(dims, hidden, &mut rng);
        net.params.iter_mut().for_each(|p| *p = 0.0);
        net
    }

    pub fn input_dim(&self) -> usize {
        self.specs[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.specs.last().unwrap().out_dim
    }

    pub fn num_layers(&self) -> usize {
        self.specs.len()
    }

    pub fn layer(&self, k: usize) -> LayerView<'_> {
        let s = self.specs[k];
        LayerView {
            weights: &self.params[s.w_off..s.w_off + s.in_dim * s.out_dim],
            biases: &self.params[s.b_off..s.b_off + s.out_dim],
            in_dim: s.in_dim,
            out_dim: s.out_dim,
            activation: s.activation,
        }
    }

    /// Flat parameter vector: per layer, row-major weights then biases.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(FeefError::DimensionMismatch(format!(
                "set_params: expected {} parameters, got {}",
                self.params.len(),
                params.len()
            )));
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    /// Layer dimensions including input, e.g. `[3, 64, 64, 4]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.specs.iter().map(|s| s.in_dim).collect();
        dims.push(self.output_dim());
        dims
    }

    pub fn hidden_activation(&self) -> Activation {
        self.specs[0].activation
    }

    fn scratch_matches(&self, scratch: &NetScratch) -> bool {
        scratch.dims.len() == self.specs.len() + 1
            && scratch.dims[0] == self.input_dim()
            && self.specs.iter().enumerate().all(|(k, s)| scratch.dims[k + 1] == s.out_dim)
    }

    fn ensure_scratch(&self, scratch: &mut NetScratch) {
        if !self.scratch_matches(scratch) {
            scratch.acts = Vec::with_capacity(self.specs.len() + 1);
            scratch.acts.push(vec![0.0; self.input_dim()]);
            scratch.pre = Vec::with_capacity(self.specs.len());
            for s in &self.specs {
                scratch.acts.push(vec![0.0; s.out_dim]);
                scratch.pre.push(vec![0.0; s.out_dim]);
            }
            let widest = self.specs.iter().map(|s| s.out_dim.max(s.in_dim)).max().unwrap();
            scratch.delta = vec![0.0; widest];
            scratch.delta_next = vec![0.0; widest];
            scratch.dims = self.dims();
        }
    }

    /// Forward pass writing activations into `scratch`; returns the output
    /// slice. No allocation after the first call with a given scratch.
    pub fn forward_scratch<'s>(&self, input: &[f64], scratch: &'s mut NetScratch) -> Result<&'s [f64]> {
        if input.len() != self.input_dim() {
            return Err(FeefError::DimensionMismatch(format!(
                "net_forward: expected input dim {}, got {}",
                self.input_dim(),
                input.len()
            )));
        }
        self.ensure_scratch(scratch);
        scratch.acts[0].copy_from_slice(input);
        for (k, s) in self.specs.iter().enumerate() {
            let (lo, hi) = scratch.acts.split_at_mut(k + 1);
            let x = lo[k].as_slice();
            let out = hi[0].as_mut_slice();
            let pre = scratch.pre[k].as_mut_slice();
            let w = &self.params[s.w_off..s.w_off + s.in_dim * s.out_dim];
            let b = &self.params[s.b_off..s.b_off + s.out_dim];
            matvec_bias(w, b, x, pre);
            for (v, z) in out.iter_mut().zip(pre.iter()) {
                *v = s.activation.apply(*z);
            }
        }
        Ok(scratch.acts.last().unwrap())
    }

    /// Convenience forward pass that allocates its output.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = NetScratch::default();
        Ok(self.forward_scratch(input, &mut scratch)?.to_vec())
    }

    /// Backpropagate `d loss / d output` (for the sample whose forward pass
    /// is currently held in `scratch`) and accumulate parameter gradients
    /// into `grads` (same layout as [`DenseNet::params`]).
    pub(crate) fn backward_accumulate(
        &self,
        out_grad: &[f64],
        scratch: &mut NetScratch,
        grads: &mut [f64],
    ) {
        debug_assert_eq!(out_grad.len(), self.output_dim());
        debug_assert_eq!(grads.len(), self.params.len());
        scratch.delta[..out_grad.len()].copy_from_slice(out_grad);
        for (k, s) in self.specs.iter().enumerate().rev() {
            let pre = &scratch.pre[k];
            let x = &scratch.acts[k];
            let w = &self.params[s.w_off..s.w_off + s.in_dim * s.out_dim];
            // delta on pre-activation
            for o in 0..s.out_dim {
                scratch.delta[o] *= s.activation.derivative(pre[o]);
            }
            // parameter grads
            for o in 0..s.out_dim {
                let d = scratch.delta[o];
                let grow = &mut grads[s.w_off + o * s.in_dim..s.w_off + (o + 1) * s.in_dim];
                for (g, xi) in grow.iter_mut().zip(x.iter()) {
                    *g += d * xi;
                }
                grads[s.b_off + o] += d;
            }
            // propagate to previous layer; row-major accumulation keeps the
            // per-element summation order (ascending o) of the strided form
            if k > 0 {
                scratch.delta_next[..s.in_dim].fill(0.0);
                for o in 0..s.out_dim {
                    let d = scratch.delta[o];
                    let row = &w[o * s.in_dim..(o + 1) * s.in_dim];
                    for (acc, wi) in scratch.delta_next[..s.in_dim].iter_mut().zip(row) {
                        *acc += d * wi;
                    }
                }
                scratch.delta[..s.in_dim].copy_from_slice(&scratch.delta_next[..s.in_dim]);
            }
        }
    }
}

/// Forward pass (allocating). See [`DenseNet::forward`].
pub fn net_forward(net: &DenseNet, input: &[f64]) -> Result<Vec<f64>> {
    net.forward(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn zero_net_maps_everything_to_zero() {
        let net = DenseNet::zeros(&[3, 5, 2], Activation::Swish);
        let y = net.forward(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn identity_single_linear_layer() {
        let mut net = DenseNet::zeros(&[3, 3], Activation::Linear);
        // set weights to the identity matrix
        for i in 0..3 {
            net.params_mut()[i * 3 + i] = 1.0;
        }
        let x = [0.7, -1.3, 2.0];
        assert_eq!(net.forward(&x).unwrap(), x.to_vec());
    }

    /// Straight-line re-computation oracle for a 2-3-2 swish net: explicit
    /// loops, no shared code with the implementation's forward pass.
    fn forward_oracle_232(net: &DenseNet, x: &[f64]) -> Vec<f64> {
        let l0 = net.layer(0);
        let mut h = vec![0.0; 3];
        for o in 0..3 {
            let mut z = l0.biases[o];
            for i in 0..2 {
                z += l0.weights[o * 2 + i] * x[i];
            }
            h[o] = z / (1.0 + (-z).exp()); // swish
        }
        let l1 = net.layer(1);
        let mut y = vec![0.0; 2];
        for o in 0..2 {
            let mut z = l1.biases[o];
            for i in 0..3 {
                z += l1.weights[o * 3 + i] * h[i];
            }
            y[o] = z;
        }
        y
    }

    #[test]
    fn random_net_matches_hand_rolled_oracle() {
        let mut rng = rng_from_seed(42);
        let net = DenseNet::new(&[2, 3, 2], Activation::Swish, &mut rng);
        for trial in 0..20 {
            let x = [
                (trial as f64) * 0.3 - 2.0,
                ((trial * 7) % 5) as f64 * 0.5 - 1.0,
            ];
            let got = net.forward(&x).unwrap();
            let want = forward_oracle_232(&net, &x);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-12, "got {g}, want {w}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let net = DenseNet::zeros(&[3, 2], Activation::Linear);
        assert!(matches!(
            net.forward(&[1.0, 2.0]),
            Err(FeefError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn init_is_seed_deterministic_and_fan_in_bounded() {
        let a = DenseNet::new(&[4, 8, 2], Activation::Swish, &mut rng_from_seed(1));
        let b = DenseNet::new(&[4, 8, 2], Activation::Swish, &mut rng_from_seed(1));
        assert_eq!(a.params(), b.params());
        let l0 = a.layer(0);
        let bound = (1.0f64 / 4.0).sqrt();
        assert!(l0.weights.iter().all(|w| w.abs() <= bound));
        assert!(l0.biases.iter().all(|b| *b == 0.0));
    }

    #[test]
    fn forward_scratch_matches_forward() {
        let mut rng = rng_from_seed(5);
        let net = DenseNet::new(&[3, 16, 16, 4], Activation::Swish, &mut rng);
        let x = [0.1, -0.7, 1.9];
        let mut scratch = NetScratch::default();
        let a = net.forward_scratch(&x, &mut scratch).unwrap().to_vec();
        let b = net.forward(&x).unwrap();
        assert_eq!(a, b);
    }
}
