//! Interaction Hamiltonians for two and three qubits, their unitary
//! evolution, entanglement measures, energy-expectation audits and the
//! correlation topology of the generalized potential families.
//!
//! Conventions: ħ = 1, angles in radians, and the basis ordering documented
//! in [`model`].

pub mod cli;
pub mod energy;
pub mod entangle;
pub mod error;
pub mod evolve;
pub mod export;
pub mod model;
pub mod qmath;
pub mod scenarios;
pub mod topo;

pub use error::{Error, Result};
