//! The 24-element single-qubit Clifford group (modulo global phase).

use std::sync::OnceLock;

use rand::Rng as _;

use crate::rng::Rng;
use crate::statevec::{mat2_mul, Gate1Q, Mat2, C64};

/// Divides out the phase of the first entry with magnitude above 1e-6 so
/// that matrices equal up to phase compare equal.
pub(crate) fn phase_canonical(m: &Mat2) -> Mat2 {
    let pivot = m.iter().flatten().find(|z| z.norm() > 1e-6).copied().unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    let mut out = *m;
    for z in out.iter_mut().flatten() {
        *z /= phase;
    }
    out
}

/// True when `a = e^{iφ} b` for some φ.
pub fn equal_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    let (ca, cb) = (phase_canonical(a), phase_canonical(b));
    ca.iter().flatten().zip(cb.iter().flatten()).all(|(x, y)| (x - y).norm() < tol)
}

/// Closes `{H, S}` under multiplication and keeps one representative per
/// phase class.
pub fn generate_single_qubit_cliffords() -> Vec<Gate1Q> {
    let gens = [*Gate1Q::h().matrix(), *Gate1Q::s().matrix()];
    let mut elements: Vec<Mat2> = vec![phase_canonical(Gate1Q::identity().matrix())];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in &gens {
                let p = phase_canonical(&mat2_mul(g, m));
                if !elements.iter().any(|e| equal_up_to_phase(e, &p, 1e-9)) {
                    elements.push(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    elements
        .into_iter()
        .map(|m| Gate1Q::unitary(m).expect("products of H and S are unitary"))
        .collect()
}

pub fn single_qubit_cliffords() -> &'static [Gate1Q] {
    static GROUP: OnceLock<Vec<Gate1Q>> = OnceLock::new();
    GROUP.get_or_init(generate_single_qubit_cliffords)
}

/// Uniform draw from the single-qubit Clifford group.
pub fn random_single_qubit_clifford(rng: &mut Rng) -> Gate1Q {
    let group = single_qubit_cliffords();
    group[rng.random_range(0..group.len())]
}

/// Independent uniform Cliffords, one per qubit.
pub fn random_local_clifford(n: usize, rng: &mut Rng) -> Vec<Gate1Q> {
    (0..n).map(|_| random_single_qubit_clifford(rng)).collect()
}
