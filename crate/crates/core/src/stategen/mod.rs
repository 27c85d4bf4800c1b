//! Generators for every state family used by the datasets.

mod clifford;
mod graph;
mod haar;

use std::fmt;
use std::str::FromStr;

pub use clifford::{
    equal_up_to_phase, generate_single_qubit_cliffords, random_local_clifford, random_single_qubit_clifford,
    single_qubit_cliffords,
};
pub use graph::{
    enumerate_four_qubit_classes, four_qubit_classes, graph_state, Graph, GraphClass, GraphClassTable,
    FOUR_QUBIT_CLASS_SIZES,
};
pub use haar::{random_haar_u2, random_local_haar, random_pure_state};

use crate::error::{Error, Result};
use crate::statevec::{StateVector, C64};

/// Representatives of the six three-qubit SLOCC families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedState {
    /// `|000>`
    Separable,
    /// `|EPR> ⊗ |0>`
    BisepAbC,
    /// `|0> ⊗ |EPR>`
    BisepABc,
    /// `(|000> + |101>)/√2`
    BisepBAc,
    /// `(|100> + |010> + |001>)/√3`
    W,
    /// `(|000> + |111>)/√2`
    Ghz,
}

impl NamedState {
    pub const ALL: [NamedState; 6] = [
        NamedState::Separable,
        NamedState::BisepAbC,
        NamedState::BisepABc,
        NamedState::BisepBAc,
        NamedState::W,
        NamedState::Ghz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedState::Separable => "separable",
            NamedState::BisepAbC => "bisep-AB-C",
            NamedState::BisepABc => "bisep-A-BC",
            NamedState::BisepBAc => "bisep-B-AC",
            NamedState::W => "W",
            NamedState::Ghz => "GHZ",
        }
    }

    pub fn state(&self) -> StateVector {
        let support: &[usize] = match self {
            NamedState::Separable => &[0],
            NamedState::BisepAbC => &[0b000, 0b110],
            NamedState::BisepABc => &[0b000, 0b011],
            NamedState::BisepBAc => &[0b000, 0b101],
            NamedState::W => &[0b100, 0b010, 0b001],
            NamedState::Ghz => &[0b000, 0b111],
        };
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        for &i in support {
            amps[i] = C64::new(1.0, 0.0);
        }
        StateVector::normalized(3, amps).expect("non-empty support")
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedState::ALL.into_iter().find(|n| n.name().eq_ignore_ascii_case(s)).ok_or_else(|| Error::UnknownName {
            name: s.to_string(),
            valid: NamedState::ALL.map(|n| n.name()).join(", "),
        })
    }
}

pub fn named_three_qubit_state(name: &str) -> Result<StateVector> {
    Ok(name.parse::<NamedState>()?.state())
}

/// Amplitude pattern shared by all stabilizer states: the support has
/// power-of-two size, nonzero amplitudes share one magnitude, and their
/// ratios to the first nonzero amplitude lie in `{±1, ±i}`.
pub fn has_stabilizer_amplitudes(state: &StateVector, tol: f64) -> bool {
    let max = state.amps().iter().map(|a| a.norm()).fold(0.0, f64::max);
    let support: Vec<C64> = state.amps().iter().copied().filter(|a| a.norm() > max * 1e-6).collect();
    if !support.len().is_power_of_two() {
        return false;
    }
    let magnitude = 1.0 / (support.len() as f64).sqrt();
    let first = support[0];
    support.iter().all(|a| {
        let ratio = a / first;
        (a.norm() - magnitude).abs() < tol
            && [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)]
                .iter()
                .any(|u| (ratio - u).norm() < tol)
    })
}
