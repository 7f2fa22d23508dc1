//! Noise folding in compressed sensing.
//!
//! When noise contaminates a sparse signal *before* an n x p measurement
//! matrix compresses it, the familiar white-noise recovery model still
//! applies after whitening, but with the noise variance inflated from
//! sigma^2 to gamma = sigma^2 + (p/n) sigma0^2: the matrix aliases all p
//! signal-noise coordinates into n measurements. This crate implements the
//! machinery to state and check that equivalence numerically:
//!
//! - seeded random measurement ensembles ([`ensembles`])
//! - the forward measurement models and their algebraic identities
//!   ([`model`])
//! - the whitening transform, folding factor gamma, and the spectral
//!   quantity eta with its perturbation functions ([`whitening`])
//! - brute-force RIP constants, coherence, and executable checks of the
//!   two perturbation propositions ([`analysis`])
//! - greedy sparse recovery to exhibit the SNR degradation ([`recovery`])
//! - a deterministic Monte Carlo harness with CSV output ([`harness`])
//!
//! Everything is reproducible bit-for-bit from explicit seeds; see
//! [`rng`] for the generator contract.

pub mod analysis;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod model;
pub mod recovery;
pub mod rng;
pub mod tol;
pub mod whitening;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
