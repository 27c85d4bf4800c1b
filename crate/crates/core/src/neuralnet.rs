//! Dense tanh post-processing head with hand-written backpropagation.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output `a`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Identity => 1.0,
        }
    }
}

/// `σ(W·x + b)` with `W` stored row-major as `outputs × inputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(inputs: usize, outputs: usize, weights: Vec<f64>, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::Shape("dense layer dimensions must be positive".into()));
        }
        if weights.len() != inputs * outputs || bias.len() != outputs {
            return Err(Error::Shape(format!(
                "layer {outputs}x{inputs} needs {} weights and {outputs} biases, got {} and {}",
                inputs * outputs,
                weights.len(),
                bias.len()
            )));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense layer parameter".into()));
        }
        Ok(Self { inputs, outputs, weights, bias, activation })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.inputs + col]
    }

    fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| {
                let z = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b;
                self.activation.apply(z)
            })
            .collect()
    }
}

/// Stack of dense layers ending in a single tanh unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
    // Bumped on every parameter write so stale caches can be detected.
    revision: u64,
}

/// Activations recorded by [`Mlp::forward`]; `activations[0]` is the input.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    revision: u64,
    activations: Vec<Vec<f64>>,
}

/// Per-layer gradients in the same layout as the layers.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl MlpGrads {
    /// Flattened in [`Mlp::params_flat`] order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.bias) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

impl Mlp {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        let last = layers.last().ok_or_else(|| Error::Shape("network needs at least one layer".into()))?;
        if last.outputs != 1 {
            return Err(Error::Shape(format!("final layer must have 1 output, has {}", last.outputs)));
        }
        if last.activation != Activation::Tanh {
            return Err(Error::Shape("final layer must use tanh".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::Shape(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    pair[0].outputs,
                    i + 1,
                    pair[1].inputs
                )));
            }
        }
        Ok(Self { layers, revision: 0 })
    }

    /// Random tanh network for `sizes = [inputs, hidden..., 1]`. Weights are
    /// uniform in `±1/√fan_in`, biases zero.
    pub fn init(sizes: &[usize], seed: u64) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Shape(format!("need input size plus at least one layer, got {sizes:?}")));
        }
        if sizes.contains(&0) {
            return Err(Error::Shape(format!("layer sizes must be positive, got {sizes:?}")));
        }
        let mut rng = rng::seeded(seed);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = 1.0 / (fan_in as f64).sqrt();
                let weights = (0..fan_in * fan_out).map(|_| rng.random_range(-bound..=bound)).collect();
                DenseLayer::new(fan_in, fan_out, weights, vec![0.0; fan_out], Activation::Tanh)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs
    }

    /// `[inputs, outputs of each layer...]`.
    pub fn sizes(&self) -> Vec<usize> {
        std::iter::once(self.input_size()).chain(self.layers.iter().map(|l| l.outputs)).collect()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(DenseLayer::n_params).sum()
    }

    /// Layer by layer: weights (row-major) then biases.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Shape(format!("expected {} head parameters, got {}", self.n_params(), flat.len())));
        }
        if flat.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("head parameter".into()));
        }
        let mut rest = flat;
        for l in &mut self.layers {
            let (w, tail) = rest.split_at(l.weights.len());
            let (b, tail) = tail.split_at(l.bias.len());
            l.weights.copy_from_slice(w);
            l.bias.copy_from_slice(b);
            rest = tail;
        }
        self.revision += 1;
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<(f64, ForwardCache)> {
        if input.len() != self.input_size() {
            return Err(Error::DimensionMismatch { expected: self.input_size(), got: input.len() });
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.to_vec());
        for l in &self.layers {
            let next = l.forward(activations.last().expect("non-empty"));
            activations.push(next);
        }
        let output = activations.last().expect("non-empty")[0];
        Ok((output, ForwardCache { revision: self.revision, activations }))
    }

    pub fn predict(&self, input: &[f64]) -> Result<f64> {
        Ok(self.forward(input)?.0)
    }

    /// Gradients of `upstream · output` with respect to every weight, bias
    /// and input component.
    pub fn backward(&self, cache: &ForwardCache, upstream: f64) -> Result<(MlpGrads, Vec<f64>)> {
        if cache.revision != self.revision || cache.activations.len() != self.layers.len() + 1 {
            return Err(Error::Shape("forward cache does not belong to this network state".into()));
        }
        for (l, a) in self.layers.iter().zip(&cache.activations) {
            if a.len() != l.inputs {
                return Err(Error::Shape("forward cache has mismatched layer widths".into()));
            }
        }

        let n = self.layers.len();
        let mut grads = MlpGrads { weights: vec![Vec::new(); n], bias: vec![Vec::new(); n] };
        let mut delta_out = vec![upstream];
        for (i, l) in self.layers.iter().enumerate().rev() {
            let x = &cache.activations[i];
            let a = &cache.activations[i + 1];
            // dL/dz = dL/da * σ'(z)
            let dz: Vec<f64> = delta_out
                .iter()
                .zip(a)
                .map(|(d, &ai)| d * l.activation.derivative_from_output(ai))
                .collect();
            let mut gw = vec![0.0; l.weights.len()];
            for (row, &dzr) in dz.iter().enumerate() {
                for (col, &xc) in x.iter().enumerate() {
                    gw[row * l.inputs + col] = dzr * xc;
                }
            }
            let mut dx = vec![0.0; l.inputs];
            for (row, &dzr) in dz.iter().enumerate() {
                for (col, slot) in dx.iter_mut().enumerate() {
                    *slot += l.weights[row * l.inputs + col] * dzr;
                }
            }
            grads.weights[i] = gw;
            grads.bias[i] = dz;
            delta_out = dx;
        }
        Ok((grads, delta_out))
    }
}
