//! Haar-random local unitaries and Gaussian random pure states.

use rand_distr::{Distribution, StandardNormal};

use crate::rng::Rng;
use crate::statevec::{Gate1Q, StateVector, C64};

fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-uniform 2x2 unitary.
///
/// Draws a complex Gaussian matrix and orthonormalizes its columns with
/// Gram-Schmidt. This is the QR decomposition whose `R` has a positive real
/// diagonal, i.e. the phase-fixed factorization `Q·Λ` with `Λ = diag(r_ii/|r_ii|)`
/// already absorbed, so `Q` is Haar distributed.
pub fn random_haar_u2(rng: &mut Rng) -> Gate1Q {
    loop {
        let a = [complex_gaussian(rng), complex_gaussian(rng)];
        let b = [complex_gaussian(rng), complex_gaussian(rng)];
        let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
        if na < 1e-8 {
            continue;
        }
        let q0 = [a[0] / na, a[1] / na];
        let proj = q0[0].conj() * b[0] + q0[1].conj() * b[1];
        let v = [b[0] - proj * q0[0], b[1] - proj * q0[1]];
        let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if nv < 1e-8 {
            continue;
        }
        let q1 = [v[0] / nv, v[1] / nv];
        let m = [[q0[0], q1[0]], [q0[1], q1[1]]];
        if let Ok(g) = Gate1Q::unitary(m) {
            return g;
        }
    }
}

pub fn random_local_haar(n: usize, rng: &mut Rng) -> Vec<Gate1Q> {
    (0..n).map(|_| random_haar_u2(rng)).collect()
}

/// i.i.d. standard complex Gaussian amplitudes, normalized.
pub fn random_pure_state(n: usize, rng: &mut Rng) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = StateVector::normalized(n, amps) {
            return s;
        }
    }
}
