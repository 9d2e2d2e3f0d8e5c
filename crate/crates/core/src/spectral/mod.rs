//! Inhomogeneously broadened line, level structure, hole burning, relaxation
//! and the fitting routines that recover slopes and lifetimes from data.

pub mod fit;
pub mod holes;
pub mod levels;
pub mod relax;

pub use fit::{fit_hole_decay, fit_side_hole_slope, DecayFit};
pub use holes::{burn_hole, burn_hole_with, BurnOptions, HoleFeature, HoleKind};
pub use levels::{
    anti_hole_detunings, linbo3_levels, linbo3_species, side_hole_detunings, FeatureDetuning,
    LevelStructure, SpinSpecies,
};
pub use relax::{relax, HoleDecayModel};
