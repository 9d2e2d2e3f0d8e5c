//! Atomic-frequency-comb memory: comb construction, causal propagation of
//! photon wave packets, echo extraction, and the dipole-sum cross-check.

pub mod comb;
pub mod oracle;
pub mod pulse;
pub mod transfer;

pub use comb::{
    analytic_efficiency, apply_taper, build_comb, comb_from_pumping, CombSpec, PumpPattern,
    ToothShape,
};
pub use oracle::{
    dipole_sum_intensity, oracle_echo_time_ns, oracle_first_echo_efficiency, DipoleEnsemble,
};
pub use pulse::{echo_analysis, propagate, EchoPeak, EchoResult, Pulse};
pub use transfer::{anticausal_fraction, transfer_function, TransferFunction};
