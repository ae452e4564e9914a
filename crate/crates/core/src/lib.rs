//! Exact and shot-level computation of ergotropy and observational ergotropy.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex matrices, density matrices, Pauli strings and
//!   Hamiltonians with cached spectral data.
//! - [`randomness`]: counter-based seeded streams, Haar unitaries, induced
//!   random states and uniform Pauli sampling.
//! - [`ergodyn`]: exact ergotropy, passive states, block coarse-graining and
//!   observational ergotropy.
//! - [`protocols`]: Monte Carlo simulation of the probability-estimation stage
//!   and of the three work-estimation protocols, plus sample-count formulas.
//! - [`concentration`]: ergotropy statistics of random states, Lipschitz
//!   probing and tail-bound checks.

pub mod concentration;
pub mod ergodyn;
mod error;
pub mod protocols;
pub mod qcore;
pub mod randomness;

pub use error::{Error, Result};
