//! Magnetic-field-dependent level structure: electronic Zeeman splitting plus
//! field-linear superhyperfine coupling of the erbium electron spin to host
//! nuclear spins. Side- and anti-hole positions follow directly from the
//! splitting slopes.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// One host nuclear-spin species coupled to the Er electron spin.
///
/// Slopes are the field-linear splitting rates in kHz/G; `nuclear_spin_twice`
/// stores 2I so half-integer spins stay exact (7Li: 3, 93Nb: 9, 6Li: 2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpinSpecies {
    pub name: String,
    pub slope_ground_khz_per_g: f64,
    pub slope_excited_khz_per_g: f64,
    pub nuclear_spin_twice: u8,
}

impl SpinSpecies {
    pub fn validate(&self) -> Result<()> {
        if self.slope_ground_khz_per_g < 0.0 || self.slope_excited_khz_per_g < 0.0 {
            return Err(CoreError::invalid(format!(
                "species {}: splitting slopes must be >= 0",
                self.name
            )));
        }
        if !(1..=9).contains(&self.nuclear_spin_twice) {
            return Err(CoreError::invalid(format!(
                "species {}: nuclear spin must be in 1/2..=9/2",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelStructure {
    /// Ground-level electronic Zeeman slope, MHz/G.
    pub electronic_zeeman_slope_mhz_per_g: f64,
    pub species: Vec<SpinSpecies>,
    /// Applied magnetic field magnitude, G.
    pub field_g: f64,
}

impl LevelStructure {
    pub fn validate(&self) -> Result<()> {
        if self.field_g < 0.0 {
            return Err(CoreError::invalid("magnetic field must be >= 0"));
        }
        if self.electronic_zeeman_slope_mhz_per_g < 0.0 {
            return Err(CoreError::invalid("electronic Zeeman slope must be >= 0"));
        }
        for s in &self.species {
            s.validate()?;
        }
        Ok(())
    }

    pub fn with_field(&self, field_g: f64) -> Self {
        LevelStructure { field_g, ..self.clone() }
    }
}

/// A spectral feature position attributed to one species.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDetuning {
    pub species: String,
    pub detuning_mhz: f64,
}

/// Side-hole detunings: the excited-level superhyperfine splitting seen from
/// the pumped ground level, `+/- slope_excited * B` per species. Sorted by
/// |detuning|.
pub fn side_hole_detunings(levels: &LevelStructure) -> Vec<FeatureDetuning> {
    let mut out = Vec::with_capacity(2 * levels.species.len());
    for s in &levels.species {
        let d = s.slope_excited_khz_per_g * levels.field_g / 1000.0;
        for sign in [-1.0, 1.0] {
            out.push(FeatureDetuning { species: s.name.clone(), detuning_mhz: sign * d });
        }
    }
    out.sort_by(|a, b| {
        a.detuning_mhz
            .abs()
            .partial_cmp(&b.detuning_mhz.abs())
            .unwrap()
            .then(a.detuning_mhz.partial_cmp(&b.detuning_mhz).unwrap())
    });
    out
}

/// Anti-hole detunings: differences between the excited- and ground-level
/// splittings, `+/- |se - sg| * B` and `+/- (se + sg) * B` per species.
pub fn anti_hole_detunings(levels: &LevelStructure) -> Vec<FeatureDetuning> {
    let mut out = Vec::with_capacity(4 * levels.species.len());
    for s in &levels.species {
        let diff = (s.slope_excited_khz_per_g - s.slope_ground_khz_per_g).abs() * levels.field_g
            / 1000.0;
        let sum = (s.slope_excited_khz_per_g + s.slope_ground_khz_per_g) * levels.field_g / 1000.0;
        for d in [diff, sum] {
            for sign in [-1.0, 1.0] {
                out.push(FeatureDetuning { species: s.name.clone(), detuning_mhz: sign * d });
            }
        }
    }
    out.sort_by(|a, b| {
        a.detuning_mhz
            .abs()
            .partial_cmp(&b.detuning_mhz.abs())
            .unwrap()
            .then(a.detuning_mhz.partial_cmp(&b.detuning_mhz).unwrap())
    });
    out
}

/// The three host species of Er:Ti:LiNbO3 with their measured excited-level
/// slopes. Ground slopes are not resolved experimentally (anti-holes are
/// smeared by spin-inhomogeneous broadening) and default to the excited value.
pub fn linbo3_species() -> Vec<SpinSpecies> {
    vec![
        SpinSpecies {
            name: "93Nb".into(),
            slope_ground_khz_per_g: 1.15,
            slope_excited_khz_per_g: 1.15,
            nuclear_spin_twice: 9,
        },
        SpinSpecies {
            name: "7Li".into(),
            slope_ground_khz_per_g: 1.721,
            slope_excited_khz_per_g: 1.721,
            nuclear_spin_twice: 3,
        },
        SpinSpecies {
            name: "6Li".into(),
            slope_ground_khz_per_g: 0.572,
            slope_excited_khz_per_g: 0.572,
            nuclear_spin_twice: 2,
        },
    ]
}

pub fn linbo3_levels(field_g: f64) -> LevelStructure {
    LevelStructure {
        electronic_zeeman_slope_mhz_per_g: 1.6,
        species: linbo3_species(),
        field_g,
    }
}
