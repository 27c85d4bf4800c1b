//! Dense statevector simulation of pure n-qubit states.
//!
//! Qubits are indexed from 0. Qubit 0 is the most significant bit of the
//! basis index, so `|x_0 x_1 ... x_{n-1}>` lives at index
//! `x_0 * 2^(n-1) + ... + x_{n-1}`. This matches the usual ket notation
//! when a state is written left to right.
//!
//! Gate application walks the amplitude array in pairs separated by the
//! qubit's stride, so a single-qubit gate costs O(2^n) and no full
//! 2^n x 2^n operator is ever formed.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Tolerance on `|‖ψ‖² - 1|` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Tolerance on `max|U†U - I|` for a matrix to count as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

#[inline]
fn bit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

#[inline]
fn check_qubit(n_qubits: usize, qubit: usize) -> Result<()> {
    if qubit >= n_qubits {
        Err(Error::QubitOutOfRange { qubit, n_qubits })
    } else {
        Ok(())
    }
}

/// Applies `m` to `qubit` of an amplitude buffer in place. The buffer need
/// not be normalized; this is the raw linear kernel behind [`StateVector::apply_1q`].
pub fn apply_mat2_in_place(amps: &mut [C64], n_qubits: usize, qubit: usize, m: &Mat2) {
    debug_assert_eq!(amps.len(), 1 << n_qubits);
    let stride = bit_mask(n_qubits, qubit);
    let dim = amps.len();
    let mut block = 0;
    while block < dim {
        for i0 in block..block + stride {
            let i1 = i0 + stride;
            let a0 = amps[i0];
            let a1 = amps[i1];
            amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        block += 2 * stride;
    }
}

pub(crate) fn apply_cz_in_place(amps: &mut [C64], n_qubits: usize, a: usize, b: usize) {
    let both = bit_mask(n_qubits, a) | bit_mask(n_qubits, b);
    for (idx, amp) in amps.iter_mut().enumerate() {
        if idx & both == both {
            *amp = -*amp;
        }
    }
}

pub(crate) fn apply_cnot_in_place(amps: &mut [C64], n_qubits: usize, control: usize, target: usize) {
    let cmask = bit_mask(n_qubits, control);
    let tmask = bit_mask(n_qubits, target);
    for idx in 0..amps.len() {
        if idx & cmask != 0 && idx & tmask == 0 {
            amps.swap(idx, idx | tmask);
        }
    }
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn mat2_dagger(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// `max |U†U - I|` over the four entries.
pub fn unitarity_deviation(m: &Mat2) -> f64 {
    let p = mat2_mul(&mat2_dagger(m), m);
    let mut dev: f64 = 0.0;
    for (r, row) in p.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let target = if r == c { ONE } else { ZERO };
            dev = dev.max((v - target).norm());
        }
    }
    dev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    S,
    X,
    Y,
    Z,
    I,
    Unitary,
}

/// A single-qubit unitary with a symbolic tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q {
    matrix: Mat2,
    kind: GateKind,
    angle: Option<f64>,
}

impl Gate1Q {
    /// `RX(θ) = exp(-iθX/2)`.
    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]];
        Self { matrix: m, kind: GateKind::Rx, angle: Some(theta) }
    }

    /// `RY(θ) = exp(-iθY/2)`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]];
        Self { matrix: m, kind: GateKind::Ry, angle: Some(theta) }
    }

    /// `RZ(θ) = exp(-iθZ/2)`.
    pub fn rz(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = [[C64::new(c, -s), ZERO], [ZERO, C64::new(c, s)]];
        Self { matrix: m, kind: GateKind::Rz, angle: Some(theta) }
    }

    pub fn h() -> Self {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        Self { matrix: [[r, r], [r, -r]], kind: GateKind::H, angle: None }
    }

    pub fn s() -> Self {
        Self { matrix: [[ONE, ZERO], [ZERO, I]], kind: GateKind::S, angle: None }
    }

    pub fn x() -> Self {
        Self { matrix: [[ZERO, ONE], [ONE, ZERO]], kind: GateKind::X, angle: None }
    }

    pub fn y() -> Self {
        Self { matrix: [[ZERO, -I], [I, ZERO]], kind: GateKind::Y, angle: None }
    }

    pub fn z() -> Self {
        Self { matrix: [[ONE, ZERO], [ZERO, -ONE]], kind: GateKind::Z, angle: None }
    }

    pub fn identity() -> Self {
        Self { matrix: IDENTITY, kind: GateKind::I, angle: None }
    }

    /// Wraps an arbitrary matrix, rejecting anything that is not unitary
    /// within [`UNITARY_TOL`].
    pub fn unitary(matrix: Mat2) -> Result<Self> {
        let deviation = unitarity_deviation(&matrix);
        if !(deviation < UNITARY_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix, kind: GateKind::Unitary, angle: None })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: mat2_dagger(&self.matrix), kind: GateKind::Unitary, angle: None }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Gate1Q) -> Self {
        Self { matrix: mat2_mul(&self.matrix, &other.matrix), kind: GateKind::Unitary, angle: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate2QKind {
    Cz,
    Cnot,
}

/// A two-qubit entangling gate. For CNOT `qubit_a` is the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate2Q {
    kind: Gate2QKind,
    qubit_a: usize,
    qubit_b: usize,
}

impl Gate2Q {
    pub fn cz(a: usize, b: usize) -> Result<Self> {
        Self::new(Gate2QKind::Cz, a, b)
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new(Gate2QKind::Cnot, control, target)
    }

    pub fn new(kind: Gate2QKind, qubit_a: usize, qubit_b: usize) -> Result<Self> {
        if qubit_a == qubit_b {
            return Err(Error::SameQubit(qubit_a));
        }
        Ok(Self { kind, qubit_a, qubit_b })
    }

    pub fn kind(&self) -> Gate2QKind {
        self.kind
    }

    pub fn qubits(&self) -> (usize, usize) {
        (self.qubit_a, self.qubit_b)
    }
}

/// Normalized amplitude vector of an n-qubit pure state.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector").field("n_qubits", &self.n_qubits).field("amps", &self.amps).finish()
    }
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(Error::Config(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Takes amplitudes that must already be normalized within [`NORM_TOL`].
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let state = Self::unchecked(n_qubits, amps)?;
        let norm_sqr = state.norm_sqr();
        if !((norm_sqr - 1.0).abs() < NORM_TOL) {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    /// Divides the amplitudes by their norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("amplitude vector norm".into()));
        }
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::unchecked(n_qubits, amps)
    }

    fn unchecked(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(Error::Config(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_1q(&self, gate: &Gate1Q, qubit: usize) -> Result<Self> {
        let mut out = self.clone();
        out.apply_1q_mut(gate, qubit)?;
        Ok(out)
    }

    pub(crate) fn apply_1q_mut(&mut self, gate: &Gate1Q, qubit: usize) -> Result<()> {
        check_qubit(self.n_qubits, qubit)?;
        apply_mat2_in_place(&mut self.amps, self.n_qubits, qubit, &gate.matrix);
        self.debug_assert_normalized();
        Ok(())
    }

    pub fn apply_2q(&self, gate: &Gate2Q) -> Result<Self> {
        let mut out = self.clone();
        out.apply_2q_mut(gate)?;
        Ok(out)
    }

    pub(crate) fn apply_2q_mut(&mut self, gate: &Gate2Q) -> Result<()> {
        let (a, b) = gate.qubits();
        check_qubit(self.n_qubits, a)?;
        check_qubit(self.n_qubits, b)?;
        match gate.kind {
            Gate2QKind::Cz => apply_cz_in_place(&mut self.amps, self.n_qubits, a, b),
            Gate2QKind::Cnot => apply_cnot_in_place(&mut self.amps, self.n_qubits, a, b),
        }
        Ok(())
    }

    /// Applies `ops[q]` to qubit `q` for every qubit.
    pub fn apply_local_operator(&self, ops: &[Gate1Q]) -> Result<Self> {
        if ops.len() != self.n_qubits {
            return Err(Error::OperatorCount { expected: self.n_qubits, got: ops.len() });
        }
        let mut out = self.clone();
        for (q, op) in ops.iter().enumerate() {
            apply_mat2_in_place(&mut out.amps, out.n_qubits, q, &op.matrix);
        }
        out.debug_assert_normalized();
        Ok(out)
    }

    /// `<Z_qubit>`.
    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        check_qubit(self.n_qubits, qubit)?;
        Ok(expect_z_raw(&self.amps, self.n_qubits, qubit))
    }

    /// `<Z_q>` for every qubit in one sweep.
    pub fn expect_z_all(&self) -> Vec<f64> {
        expect_z_all_raw(&self.amps, self.n_qubits)
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Reduced density matrix of one qubit.
    pub fn reduced_qubit(&self, qubit: usize) -> Result<Mat2> {
        check_qubit(self.n_qubits, qubit)?;
        let mask = bit_mask(self.n_qubits, qubit);
        let mut rho = [[ZERO; 2]; 2];
        for i0 in (0..self.dim()).filter(|i| i & mask == 0) {
            let a0 = self.amps[i0];
            let a1 = self.amps[i0 | mask];
            rho[0][0] += a0 * a0.conj();
            rho[0][1] += a0 * a1.conj();
            rho[1][0] += a1 * a0.conj();
            rho[1][1] += a1 * a1.conj();
        }
        Ok(rho)
    }

    #[inline]
    fn debug_assert_normalized(&self) {
        debug_assert!(
            (self.norm_sqr() - 1.0).abs() < NORM_TOL,
            "gate application broke normalization: {}",
            self.norm_sqr()
        );
    }
}

pub(crate) fn expect_z_raw(amps: &[C64], n_qubits: usize, qubit: usize) -> f64 {
    let mask = bit_mask(n_qubits, qubit);
    amps.iter()
        .enumerate()
        .map(|(k, a)| if k & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

pub(crate) fn expect_z_all_raw(amps: &[C64], n_qubits: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_qubits];
    for (k, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        for (q, slot) in out.iter_mut().enumerate() {
            if k & bit_mask(n_qubits, q) == 0 {
                *slot += p;
            } else {
                *slot -= p;
            }
        }
    }
    out
}
