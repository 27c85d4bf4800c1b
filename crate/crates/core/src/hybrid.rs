//! Circuit + dense head as one trainable model: MSE cost, Adam, the
//! mini-batch training loop and sign-threshold accuracy.
//!
//! Gradients are chained by hand. The cost derivative `2(y' - y)/m` is fed
//! to the head's backward pass, and the head's input gradient becomes the
//! upstream vector of the circuit's parameter-shift gradient.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::ansatz::{amplitude_encode, circuit_forward, circuit_gradient, AnsatzConfig, CircuitParams};
use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::neuralnet::Mlp;
use crate::rng;
use crate::statevec::{StateVector, C64};

/// A circuit followed by an optional classical head.
///
/// With a head the prediction is `head([<Z_0>, ..., <Z_{n-1}>])`. Without
/// one the model is a plain variational classifier whose prediction is
/// `<Z_0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub cfg: AnsatzConfig,
    pub qparams: CircuitParams,
    pub head: Option<Mlp>,
}

impl HybridModel {
    pub fn new(cfg: AnsatzConfig, qparams: CircuitParams, head: Option<Mlp>) -> Result<Self> {
        cfg.validate()?;
        if qparams.len() != cfg.n_params() {
            return Err(Error::Shape(format!(
                "circuit needs {} parameters, got {}",
                cfg.n_params(),
                qparams.len()
            )));
        }
        if let Some(h) = &head {
            if h.input_size() != cfg.n_qubits {
                return Err(Error::Shape(format!(
                    "head expects {} inputs but the circuit has {} qubits",
                    h.input_size(),
                    cfg.n_qubits
                )));
            }
        }
        Ok(Self { cfg, qparams, head })
    }

    /// Angles uniform in `[-angle_width, angle_width]` and a fresh head with
    /// `hidden` tanh layers between the `n_qubits` readouts and the single
    /// output. `hidden = None` drops the head entirely.
    pub fn init(cfg: AnsatzConfig, hidden: Option<&[usize]>, angle_width: f64, seed: u64) -> Result<Self> {
        cfg.validate()?;
        if !(angle_width.is_finite() && angle_width >= 0.0) {
            return Err(Error::Config(format!("angle width must be finite and non-negative, got {angle_width}")));
        }
        let qparams = CircuitParams::uniform(&cfg, angle_width, &mut rng::substream(seed, "circuit-init", 0));
        let head = match hidden {
            Some(hidden) => {
                let mut sizes = vec![cfg.n_qubits];
                sizes.extend_from_slice(hidden);
                sizes.push(1);
                Some(Mlp::init(&sizes, rng::derive_seed(seed, "head-init", 0))?)
            }
            None => None,
        };
        Self::new(cfg, qparams, head)
    }

    pub fn n_params(&self) -> usize {
        self.qparams.len() + self.head.as_ref().map_or(0, Mlp::n_params)
    }

    /// Circuit angles followed by the head parameters.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = self.qparams.as_slice().to_vec();
        if let Some(h) = &self.head {
            out.extend(h.params_flat());
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Shape(format!("expected {} parameters, got {}", self.n_params(), flat.len())));
        }
        let (q, h) = flat.split_at(self.qparams.len());
        self.qparams = CircuitParams::from_vec(&self.cfg, q.to_vec())?;
        if let Some(head) = &mut self.head {
            head.set_params_flat(h)?;
        }
        Ok(())
    }

    pub fn encode(&self, x: &[C64]) -> Result<StateVector> {
        amplitude_encode(x, self.cfg.n_qubits, &[])
    }

    pub fn predict(&self, x: &[C64]) -> Result<f64> {
        let z = circuit_forward(&self.cfg, &self.qparams, &self.encode(x)?)?;
        match &self.head {
            Some(h) => h.predict(&z),
            None => Ok(z[0]),
        }
    }

    /// Prediction and the gradient of `upstream · prediction` over
    /// [`params_flat`](Self::params_flat).
    pub fn predict_with_gradient(&self, x: &[C64], upstream: f64) -> Result<(f64, Vec<f64>)> {
        self.gradient_with(x, |_| upstream)
    }

    /// Like [`predict_with_gradient`](Self::predict_with_gradient) with the
    /// upstream scalar computed from the prediction, so the forward pass runs once.
    pub fn gradient_with(&self, x: &[C64], upstream_of: impl Fn(f64) -> f64) -> Result<(f64, Vec<f64>)> {
        let encoded = self.encode(x)?;
        let z = circuit_forward(&self.cfg, &self.qparams, &encoded)?;
        let (y, head_grad, dz) = match &self.head {
            Some(h) => {
                let (y, cache) = h.forward(&z)?;
                let (g, dz) = h.backward(&cache, upstream_of(y))?;
                (y, g.flatten(), dz)
            }
            None => {
                let mut dz = vec![0.0; self.cfg.n_qubits];
                dz[0] = upstream_of(z[0]);
                (z[0], Vec::new(), dz)
            }
        };
        let qgrad = circuit_gradient(&self.cfg, &self.qparams, &encoded, &dz)?;
        let mut grad = qgrad.as_slice().to_vec();
        grad.extend(head_grad);
        Ok((y, grad))
    }

    pub fn predict_all(&self, ds: &Dataset) -> Result<Vec<f64>> {
        ds.samples().par_iter().map(|s| self.predict(&s.features)).collect()
    }
}

/// `(1/m) Σ (y_i - y'_i)²`.
pub fn mse_cost(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: predictions.len() });
    }
    if predictions.is_empty() {
        return Err(Error::Shape("cost of an empty batch".into()));
    }
    let m = predictions.len() as f64;
    Ok(predictions.iter().zip(labels).map(|(p, y)| (y - p) * (y - p)).sum::<f64>() / m)
}

/// Label predicted from a real output: `+1` when `output >= 0`.
pub fn sign_label(output: f64) -> i8 {
    if output >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn accuracy_of(predictions: &[f64], labels: &[i8]) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    let hits = predictions.iter().zip(labels).filter(|(p, &y)| sign_label(**p) == y).count();
    hits as f64 / predictions.len() as f64
}

pub fn evaluate_accuracy(model: &HybridModel, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Shape("accuracy of an empty dataset".into()));
    }
    Ok(accuracy_of(&model.predict_all(ds)?, &ds.labels()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(n_params: usize, learning_rate: f64) -> Self {
        Self { learning_rate, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: vec![0.0; n_params], v: vec![0.0; n_params] }
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::Shape(format!(
            "adam: {} params, {} grads, {} moments",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFinite(format!("gradient component {i} is {}", grads[i])));
    }
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(state.m.iter_mut().zip(state.v.iter_mut())) {
        *m = state.beta1 * *m + (1.0 - state.beta1) * g;
        *v = state.beta2 * *v + (1.0 - state.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= state.learning_rate * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Stop once the epoch cost moved less than this over `patience` epochs.
    pub early_stop_tol: Option<f64>,
    pub patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 150, batch_size: 32, learning_rate: 0.005, seed: 0, early_stop_tol: Some(1e-6), patience: 10 }
    }
}

impl TrainConfig {
    pub fn validate(&self, dataset_len: usize) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(Error::Config(format!("learning rate {} outside (0, 1)", self.learning_rate)));
        }
        if dataset_len == 0 {
            return Err(Error::Config("cannot train on an empty dataset".into()));
        }
        if self.batch_size > dataset_len {
            return Err(Error::Config(format!(
                "batch size {} exceeds dataset size {dataset_len}",
                self.batch_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub cost: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub initial_cost: f64,
    pub history: Vec<EpochRecord>,
}

impl FitReport {
    pub fn final_cost(&self) -> f64 {
        self.history.last().map_or(self.initial_cost, |r| r.cost)
    }

    pub fn epochs_run(&self) -> usize {
        self.history.len()
    }
}

fn cost_and_accuracy(model: &HybridModel, ds: &Dataset) -> Result<(f64, f64)> {
    let preds = model.predict_all(ds)?;
    let labels = ds.labels();
    let targets: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    Ok((mse_cost(&preds, &targets)?, accuracy_of(&preds, &labels)))
}

/// Mini-batch Adam on the MSE cost. The epoch cost and accuracy are
/// measured on the full training set after each epoch.
pub fn fit(model: &mut HybridModel, ds: &Dataset, cfg: &TrainConfig) -> Result<FitReport> {
    cfg.validate(ds.len())?;
    if ds.n_qubits() != model.cfg.n_qubits {
        return Err(Error::Shape(format!(
            "dataset has {} qubits, model has {}",
            ds.n_qubits(),
            model.cfg.n_qubits
        )));
    }
    let samples = ds.samples();
    let mut params = model.params_flat();
    let mut adam = AdamState::new(params.len(), cfg.learning_rate);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut shuffle_rng = rng::substream(cfg.seed, "fit-shuffle", 0);

    let (initial_cost, _) = cost_and_accuracy(model, ds)?;
    let mut history: Vec<EpochRecord> = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for (batch_idx, batch) in order.chunks(cfg.batch_size).enumerate() {
            let m = batch.len() as f64;
            let per_sample: Vec<Vec<f64>> = batch
                .par_iter()
                .map(|&i| {
                    let s = &samples[i];
                    let label = s.label as f64;
                    Ok(model.gradient_with(&s.features, |y| 2.0 * (y - label) / m)?.1)
                })
                .collect::<Result<_>>()?;
            let mut grad = vec![0.0; params.len()];
            for g in &per_sample {
                for (acc, v) in grad.iter_mut().zip(g) {
                    *acc += v;
                }
            }
            adam_step(&mut params, &grad, &mut adam).map_err(|e| {
                Error::NonFinite(format!("epoch {epoch}, batch {batch_idx}: {e}"))
            })?;
            model.set_params_flat(&params)?;
        }
        let (cost, train_accuracy) = cost_and_accuracy(model, ds)?;
        if !cost.is_finite() {
            return Err(Error::NonFinite(format!("training cost at epoch {epoch}")));
        }
        history.push(EpochRecord { epoch, cost, train_accuracy });

        if let Some(tol) = cfg.early_stop_tol {
            if history.len() > cfg.patience {
                let past = history[history.len() - 1 - cfg.patience].cost;
                if (cost - past).abs() < tol {
                    break;
                }
            }
        }
    }
    Ok(FitReport { initial_cost, history })
}
