//! Hybrid variational quantum classifiers for entanglement orbits of pure
//! multi-qubit states, simulated exactly on dense statevectors.
//!
//! The pipeline: [`stategen`] builds states (graph states, local Clifford
//! and Haar orbits, named three-qubit states), [`datasets`] turns them into
//! balanced labeled sets, and [`hybrid`] trains an [`ansatz`] circuit
//! followed by a [`neuralnet`] head on them. [`experiment`] wires these
//! into reproducible runs.

pub mod ansatz;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod hybrid;
pub mod neuralnet;
pub mod rng;
pub mod stategen;
pub mod statevec;

pub use error::{Error, Result};
