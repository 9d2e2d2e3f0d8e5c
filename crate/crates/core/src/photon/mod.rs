//! Photon-counting Monte Carlo: pair source, detection streams, coincidence
//! histograms, and g2 estimation.

pub mod g2;
pub mod histogram;
pub mod source;

pub use g2::{g2_from_histogram, symmetric_offsets, G2Estimate};
pub use histogram::{build_histogram, CoincidenceHistogram};
pub use source::{simulate_run, DetectionRecord, MemoryChannel, PairDistribution, SourceConfig};
