//! Average MBQC fidelity of noisy stabilizer resource states.
//!
//! The crate builds the fidelity operator `Ω` of a resource state with flow,
//! samples its stabilizer terms for direct estimation, computes its spectrum,
//! and simulates noisy measurement-based computation on small states to check
//! all of the above against each other.

pub mod cli;
pub mod error;
pub mod estimate;
pub mod gf2;
pub mod omega;
pub mod pauli;
pub mod resource;
pub mod sampler;
pub mod sim;

pub use error::{Error, Result};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

pub use pauli::{Letter, PauliWord, QubitSet};
pub use omega::{Dyadic, PauliSum};
pub use resource::{ResourceState, StabilizerGroup};
