//! Amplitude encoding and the layered rotation/entangler circuit.
//!
//! Each layer applies `RX(α) RY(β) RZ(γ)` to every qubit (in that order)
//! followed by a fixed entangling pattern. The readout is `<Z_q>` on every
//! qubit. Gradients use the parameter-shift rule, which is exact for
//! rotations of the form `exp(-iθP/2)`.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::statevec::{
    apply_cnot_in_place, apply_cz_in_place, apply_mat2_in_place, expect_z_all_raw, Gate1Q, StateVector, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Entangler {
    /// `CNOT(q, q+1)` for every neighbor pair, closed by `CNOT(n-1, 0)` when n ≥ 3.
    #[default]
    RingCnot,
    /// `CNOT(q, q+1)` without the closing gate.
    LinearCnot,
    /// Same topology as the CNOT ring with CZ gates.
    RingCz,
}

impl Entangler {
    pub fn name(&self) -> &'static str {
        match self {
            Entangler::RingCnot => "ring-cnot",
            Entangler::LinearCnot => "linear-cnot",
            Entangler::RingCz => "ring-cz",
        }
    }
}

impl FromStr for Entangler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring-cnot" => Ok(Entangler::RingCnot),
            "linear-cnot" => Ok(Entangler::LinearCnot),
            "ring-cz" => Ok(Entangler::RingCz),
            _ => Err(Error::UnknownName {
                name: s.to_string(),
                valid: "ring-cnot, linear-cnot, ring-cz".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub entangler: Entangler,
}

impl AnsatzConfig {
    pub fn new(n_qubits: usize, n_layers: usize, entangler: Entangler) -> Result<Self> {
        let cfg = Self { n_qubits, n_layers, entangler };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > 20 {
            return Err(Error::Config(format!("n_qubits must be in 1..=20, got {}", self.n_qubits)));
        }
        if self.n_layers == 0 {
            return Err(Error::Config("n_layers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.n_layers * self.n_qubits * 3
    }

    /// Control/target pairs of one entangling block.
    pub fn entangling_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_qubits;
        let mut pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|q| (q, q + 1)).collect();
        if n >= 3 && matches!(self.entangler, Entangler::RingCnot | Entangler::RingCz) {
            pairs.push((n - 1, 0));
        }
        pairs
    }
}

/// Trainable angles, shape `[layer][qubit][slot]` with slots (α, β, γ)
/// driving (RX, RY, RZ).
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams {
    n_layers: usize,
    n_qubits: usize,
    values: Vec<f64>,
}

impl CircuitParams {
    pub fn zeros(cfg: &AnsatzConfig) -> Self {
        Self { n_layers: cfg.n_layers, n_qubits: cfg.n_qubits, values: vec![0.0; cfg.n_params()] }
    }

    /// Uniform angles in `[0, 2π)`.
    pub fn random(cfg: &AnsatzConfig, rng: &mut Rng) -> Self {
        let values = (0..cfg.n_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        Self { n_layers: cfg.n_layers, n_qubits: cfg.n_qubits, values }
    }

    /// Uniform angles in `[-width, width]`. Small widths start the circuit
    /// near the bare entangler network.
    pub fn uniform(cfg: &AnsatzConfig, width: f64, rng: &mut Rng) -> Self {
        let values = (0..cfg.n_params())
            .map(|_| if width > 0.0 { rng.random_range(-width..=width) } else { 0.0 })
            .collect();
        Self { n_layers: cfg.n_layers, n_qubits: cfg.n_qubits, values }
    }

    pub fn from_vec(cfg: &AnsatzConfig, values: Vec<f64>) -> Result<Self> {
        if values.len() != cfg.n_params() {
            return Err(Error::Shape(format!(
                "expected {} circuit parameters for {} layers x {} qubits, got {}",
                cfg.n_params(),
                cfg.n_layers,
                cfg.n_qubits,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("circuit parameter {i}")));
        }
        Ok(Self { n_layers: cfg.n_layers, n_qubits: cfg.n_qubits, values })
    }

    #[inline]
    pub fn index(&self, layer: usize, qubit: usize, slot: usize) -> usize {
        (layer * self.n_qubits + qubit) * 3 + slot
    }

    pub fn get(&self, layer: usize, qubit: usize, slot: usize) -> f64 {
        self.values[self.index(layer, qubit, slot)]
    }

    pub fn set(&mut self, layer: usize, qubit: usize, slot: usize, value: f64) {
        let i = self.index(layer, qubit, slot);
        self.values[i] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, cfg: &AnsatzConfig) -> Result<()> {
        if self.n_layers != cfg.n_layers || self.n_qubits != cfg.n_qubits {
            return Err(Error::Shape(format!(
                "params are [{}, {}, 3] but config wants [{}, {}, 3]",
                self.n_layers, self.n_qubits, cfg.n_layers, cfg.n_qubits
            )));
        }
        Ok(())
    }
}

/// Loads `features ++ pad` (zero-filled up to 2^n) as normalized amplitudes.
pub fn amplitude_encode(features: &[C64], n_qubits: usize, pad: &[C64]) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > 30 {
        return Err(Error::Config(format!("unsupported qubit count {n_qubits}")));
    }
    let dim = 1usize << n_qubits;
    if features.len() > dim {
        return Err(Error::DimensionMismatch { expected: dim, got: features.len() });
    }
    if features.len() + pad.len() > dim {
        return Err(Error::DimensionMismatch { expected: dim, got: features.len() + pad.len() });
    }
    let mut amps = Vec::with_capacity(dim);
    amps.extend_from_slice(features);
    amps.extend_from_slice(pad);
    amps.resize(dim, C64::new(0.0, 0.0));
    StateVector::normalized(n_qubits, amps)
}

#[derive(Debug, Clone, Copy)]
enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Rot { param: usize, qubit: usize, axis: Axis },
    Cnot(usize, usize),
    Cz(usize, usize),
}

fn rotation(axis: Axis, theta: f64) -> Gate1Q {
    match axis {
        Axis::X => Gate1Q::rx(theta),
        Axis::Y => Gate1Q::ry(theta),
        Axis::Z => Gate1Q::rz(theta),
    }
}

fn circuit_ops(cfg: &AnsatzConfig) -> Vec<Op> {
    let pairs = cfg.entangling_pairs();
    let mut ops = Vec::with_capacity(cfg.n_params() + cfg.n_layers * pairs.len());
    for layer in 0..cfg.n_layers {
        for qubit in 0..cfg.n_qubits {
            let base = (layer * cfg.n_qubits + qubit) * 3;
            ops.push(Op::Rot { param: base, qubit, axis: Axis::X });
            ops.push(Op::Rot { param: base + 1, qubit, axis: Axis::Y });
            ops.push(Op::Rot { param: base + 2, qubit, axis: Axis::Z });
        }
        for &(a, b) in &pairs {
            ops.push(match cfg.entangler {
                Entangler::RingCz => Op::Cz(a, b),
                _ => Op::Cnot(a, b),
            });
        }
    }
    ops
}

fn run_ops(amps: &mut [C64], n_qubits: usize, ops: &[Op], theta: &[f64]) {
    for op in ops {
        match *op {
            Op::Rot { param, qubit, axis } => {
                apply_mat2_in_place(amps, n_qubits, qubit, rotation(axis, theta[param]).matrix())
            }
            Op::Cnot(c, t) => apply_cnot_in_place(amps, n_qubits, c, t),
            Op::Cz(a, b) => apply_cz_in_place(amps, n_qubits, a, b),
        }
    }
}

fn check_inputs(cfg: &AnsatzConfig, params: &CircuitParams, encoded: &StateVector) -> Result<()> {
    cfg.validate()?;
    params.check(cfg)?;
    if encoded.n_qubits() != cfg.n_qubits {
        return Err(Error::Shape(format!(
            "encoded state has {} qubits, circuit has {}",
            encoded.n_qubits(),
            cfg.n_qubits
        )));
    }
    Ok(())
}

/// State after the circuit, before readout.
pub fn circuit_state(cfg: &AnsatzConfig, params: &CircuitParams, encoded: &StateVector) -> Result<StateVector> {
    check_inputs(cfg, params, encoded)?;
    let mut amps = encoded.amps().to_vec();
    run_ops(&mut amps, cfg.n_qubits, &circuit_ops(cfg), &params.values);
    StateVector::from_amplitudes(cfg.n_qubits, amps)
}

/// `[<Z_0>, ..., <Z_{n-1}>]` after running the circuit on `encoded`.
pub fn circuit_forward(cfg: &AnsatzConfig, params: &CircuitParams, encoded: &StateVector) -> Result<Vec<f64>> {
    check_inputs(cfg, params, encoded)?;
    let mut amps = encoded.amps().to_vec();
    run_ops(&mut amps, cfg.n_qubits, &circuit_ops(cfg), &params.values);
    Ok(expect_z_all_raw(&amps, cfg.n_qubits))
}

/// `Σ_q upstream[q] · ∂<Z_q>/∂θ` for every angle, by parameter shift.
///
/// The state just before each rotation is cached from one forward sweep, so
/// each shifted evaluation only replays the suffix of the circuit.
pub fn circuit_gradient(
    cfg: &AnsatzConfig,
    params: &CircuitParams,
    encoded: &StateVector,
    upstream: &[f64],
) -> Result<CircuitParams> {
    check_inputs(cfg, params, encoded)?;
    if upstream.len() != cfg.n_qubits {
        return Err(Error::Shape(format!(
            "upstream has length {}, circuit has {} outputs",
            upstream.len(),
            cfg.n_qubits
        )));
    }
    let mut grad = CircuitParams::zeros(cfg);
    if upstream.iter().all(|&u| u == 0.0) {
        return Ok(grad);
    }

    let n = cfg.n_qubits;
    let ops = circuit_ops(cfg);
    let theta = &params.values;
    let weighted = |amps: &[C64]| -> f64 {
        expect_z_all_raw(amps, n).iter().zip(upstream).map(|(z, u)| z * u).sum()
    };

    let mut state = encoded.amps().to_vec();
    let mut shifted = state.clone();
    for (k, op) in ops.iter().enumerate() {
        if let Op::Rot { param, qubit, axis } = *op {
            let mut eval = |shift: f64| {
                shifted.copy_from_slice(&state);
                apply_mat2_in_place(&mut shifted, n, qubit, rotation(axis, theta[param] + shift).matrix());
                run_ops(&mut shifted, n, &ops[k + 1..], theta);
                weighted(&shifted)
            };
            let plus = eval(FRAC_PI_2);
            let minus = eval(-FRAC_PI_2);
            grad.values[param] = 0.5 * (plus - minus);
        }
        run_ops(&mut state, n, std::slice::from_ref(op), theta);
    }
    Ok(grad)
}
