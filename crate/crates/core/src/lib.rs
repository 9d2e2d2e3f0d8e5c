//! Simulation library for a waveguide atomic-frequency-comb quantum memory
//! fed by a pulsed photon-pair source.
//!
//! The pipeline mirrors the physical experiment: persistent spectral hole
//! burning shapes an inhomogeneous absorption line into a comb, the comb's
//! complex transfer function propagates weak pulses and produces delayed
//! echoes, and a Monte Carlo photon-counting layer turns storage into
//! detection statistics and cross-correlation measurements.

pub mod afc;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod photon;
pub mod rng;
pub mod selftest;
pub mod spectral;

pub use error::{CoreError, Result};
pub use grid::SpectralGrid;
pub use rng::Rng;
