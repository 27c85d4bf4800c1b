//! Independent oracles: dense matrices built from Kronecker products, a
//! naive MLP and central finite differences.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use orbitvqc::ansatz::{AnsatzConfig, CircuitParams, Entangler};
use orbitvqc::neuralnet::{Activation, Mlp};

pub type Dense = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(dim: usize) -> Dense {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect()).collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn apply(m: &Dense, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `I ⊗ .. ⊗ g ⊗ .. ⊗ I` with qubit 0 as the leftmost factor.
pub fn embed(g: [[C; 2]; 2], qubit: usize, n: usize) -> Dense {
    let g: Dense = g.iter().map(|r| r.to_vec()).collect();
    let id2 = identity(2);
    let mut out = identity(1);
    for q in 0..n {
        out = kron(&out, if q == qubit { &g } else { &id2 });
    }
    out
}

pub fn rx(t: f64) -> [[C; 2]; 2] {
    let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
    [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]]
}

pub fn ry(t: f64) -> [[C; 2]; 2] {
    let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
    [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]]
}

pub fn rz(t: f64) -> [[C; 2]; 2] {
    [[C::from_polar(1.0, -t / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), C::from_polar(1.0, t / 2.0)]]
}

fn bit(i: usize, q: usize, n: usize) -> usize {
    (i >> (n - 1 - q)) & 1
}

pub fn cnot(control: usize, target: usize, n: usize) -> Dense {
    let dim = 1 << n;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        let j = if bit(i, control, n) == 1 { i ^ (1 << (n - 1 - target)) } else { i };
        m[j][i] = c(1.0, 0.0);
    }
    m
}

pub fn cz(a: usize, b: usize, n: usize) -> Dense {
    let dim = 1 << n;
    let mut m = identity(dim);
    for (i, row) in m.iter_mut().enumerate() {
        if bit(i, a, n) == 1 && bit(i, b, n) == 1 {
            row[i] = c(-1.0, 0.0);
        }
    }
    m
}

/// The whole ansatz as one dense unitary.
pub fn circuit_unitary(cfg: &AnsatzConfig, params: &CircuitParams) -> Dense {
    let n = cfg.n_qubits;
    let mut u = identity(1 << n);
    for layer in 0..cfg.n_layers {
        for q in 0..n {
            for (slot, gate) in [rx as fn(f64) -> [[C; 2]; 2], ry, rz].iter().enumerate() {
                u = matmul(&embed(gate(params.get(layer, q, slot)), q, n), &u);
            }
        }
        let mut pairs: Vec<(usize, usize)> = (0..n - 1).map(|q| (q, q + 1)).collect();
        if cfg.entangler != Entangler::LinearCnot && n >= 3 {
            pairs.push((n - 1, 0));
        }
        for (a, b) in pairs {
            let e = if cfg.entangler == Entangler::RingCz { cz(a, b, n) } else { cnot(a, b, n) };
            u = matmul(&e, &u);
        }
    }
    u
}

pub fn expect_z(state: &[C], q: usize, n: usize) -> f64 {
    state.iter().enumerate().map(|(i, a)| a.norm_sqr() * if bit(i, q, n) == 0 { 1.0 } else { -1.0 }).sum()
}

/// Normalizes `x` zero-padded to 2^n.
pub fn encode(x: &[C], n: usize) -> Vec<C> {
    let mut v = x.to_vec();
    v.resize(1 << n, c(0.0, 0.0));
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|a| a / norm).collect()
}

pub fn circuit_oracle(cfg: &AnsatzConfig, params: &CircuitParams, x: &[C]) -> Vec<f64> {
    let out = apply(&circuit_unitary(cfg, params), &encode(x, cfg.n_qubits));
    (0..cfg.n_qubits).map(|q| expect_z(&out, q, cfg.n_qubits)).collect()
}

/// Forward pass written directly from the layer weights.
pub fn mlp_oracle(mlp: &Mlp, input: &[f64]) -> f64 {
    let mut a = input.to_vec();
    for layer in mlp.layers() {
        a = (0..layer.outputs())
            .map(|r| {
                let z = layer.bias()[r] + (0..layer.inputs()).map(|k| layer.weight(r, k) * a[k]).sum::<f64>();
                match layer.activation() {
                    Activation::Tanh => z.tanh(),
                    Activation::Identity => z,
                }
            })
            .collect();
    }
    a[0]
}

/// Central finite difference of `f` along each coordinate of `x`.
pub fn finite_diff(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a - b| <= rel * max(|a|, |b|) + abs`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}
