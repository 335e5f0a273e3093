//! Simulation library for Rydberg-dressing energy cat states of strontium
//! lattice atoms: collective spin dynamics, fidelity and decoherence models,
//! Rydberg atomic rates, cat-size optimization and detection bounds.

pub mod atomic;
pub mod constants;
pub mod data;
pub mod decoherence;
pub mod dressing;
pub mod error;
pub mod inhomogeneity;
pub mod kerr;
pub mod metrology;
pub mod optim;
pub mod quad;
pub mod scaling;
pub mod spinsim;

pub use error::{Error, Result};
