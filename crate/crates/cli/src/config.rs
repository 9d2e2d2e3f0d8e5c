//! TOML run configuration: every field optional, defaults taken from the
//! published-experiment preset, unknown keys rejected.

use std::path::Path;

use serde::Deserialize;

use afc_core::afc::ToothShape;
use afc_core::error::{CoreError, Result};
use afc_core::experiment::{paper_preset, CombRecipe, ExperimentConfig};
use afc_core::photon::PairDistribution;
use afc_core::spectral::HoleDecayModel;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    comb: Option<RawComb>,
    source: Option<RawSource>,
    timing: Option<RawTiming>,
    levels: Option<RawLevels>,
    run: Option<RawRun>,
    burn: Option<RawBurn>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComb {
    bandwidth_ghz: Option<f64>,
    delta_mhz: Option<f64>,
    finesse: Option<f64>,
    peak_od: Option<f64>,
    background_od: Option<f64>,
    tooth_shape: Option<String>,
    taper_fraction: Option<f64>,
    /// "direct" (default) or "pumped"
    mode: Option<String>,
    line_od: Option<f64>,
    pump_strength: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    rep_rate_mhz: Option<f64>,
    mean_pairs: Option<f64>,
    pair_distribution: Option<String>,
    spurious_mode_fraction: Option<f64>,
    signal_path_efficiency: Option<f64>,
    idler_path_efficiency: Option<f64>,
    dark_rate_signal_hz: Option<f64>,
    dark_rate_idler_hz: Option<f64>,
    jitter_fwhm_ps: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTiming {
    pump_ms: Option<f64>,
    wait_ms: Option<f64>,
    store_ms: Option<f64>,
    cycles: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevels {
    field_g: Option<f64>,
    electronic_zeeman_slope_mhz_per_g: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    input_fwhm_ghz: Option<f64>,
    g2_half_window_ns: Option<f64>,
    accidental_periods: Option<usize>,
    repump_each_cycle: Option<bool>,
    /// "none" (default), "low_field", or "high_field"
    decay: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBurn {
    center_mhz: Option<f64>,
    width_mhz: Option<f64>,
    strength: Option<f64>,
    branching: Option<f64>,
    line_od: Option<f64>,
    span_mhz: Option<f64>,
    step_mhz: Option<f64>,
}

/// Hole-burning parameters of the `holeburn` subcommand.
#[derive(Debug, Clone)]
pub struct BurnParams {
    pub center_mhz: f64,
    pub width_mhz: f64,
    pub strength: f64,
    pub branching: f64,
    pub line_od: f64,
    pub span_mhz: f64,
    pub step_mhz: f64,
}

impl Default for BurnParams {
    fn default() -> Self {
        BurnParams {
            center_mhz: 0.0,
            width_mhz: 1.0,
            strength: 20.0,
            branching: 0.9,
            line_od: 2.0,
            span_mhz: 120.0,
            step_mhz: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub experiment: ExperimentConfig,
    pub burn: BurnParams,
    decay_name: String,
}

impl RunConfig {
    pub fn decay_model(&self) -> HoleDecayModel {
        match self.decay_name.as_str() {
            "high_field" => HoleDecayModel::high_field(),
            _ => HoleDecayModel::low_field(),
        }
    }

    /// Merge preset defaults, config file, and the command-line seed; the
    /// seed must come from one of the two (no silent entropy).
    pub fn load(path: Option<&Path>, preset: Option<&str>, cli_seed: Option<u64>) -> Result<Self> {
        match preset {
            None | Some("paper") => {}
            Some(other) => {
                return Err(CoreError::Config(format!(
                    "unknown preset '{other}' (supported: paper)"
                )))
            }
        }
        let raw: RawConfig = match path {
            None => RawConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                toml::from_str(&text).map_err(|e| CoreError::Parse(format!("{}: {e}", p.display())))?
            }
        };

        let mut exp = paper_preset();
        if let Some(c) = &raw.comb {
            let (mut spec, mut taper) = match &exp.recipe {
                CombRecipe::Direct { spec, taper_fraction } => (spec.clone(), *taper_fraction),
                CombRecipe::Pumped { spec, .. } => (spec.clone(), 1.0),
            };
            set(&mut spec.bandwidth_ghz, c.bandwidth_ghz);
            set(&mut spec.delta_mhz, c.delta_mhz);
            set(&mut spec.finesse, c.finesse);
            set(&mut spec.peak_od, c.peak_od);
            set(&mut spec.background_od, c.background_od);
            if let Some(shape) = &c.tooth_shape {
                spec.tooth_shape = match shape.as_str() {
                    "square" => ToothShape::Square,
                    "gaussian" => ToothShape::Gaussian,
                    other => {
                        return Err(CoreError::Config(format!(
                            "comb: unknown tooth_shape '{other}' (square | gaussian)"
                        )))
                    }
                };
            }
            set(&mut taper, c.taper_fraction);
            exp.recipe = match c.mode.as_deref() {
                None | Some("direct") => CombRecipe::Direct { spec, taper_fraction: taper },
                Some("pumped") => CombRecipe::Pumped {
                    spec,
                    line_od: c.line_od.unwrap_or(1.2),
                    pump_strength: c.pump_strength.unwrap_or(30.0),
                },
                Some(other) => {
                    return Err(CoreError::Config(format!(
                        "comb: unknown mode '{other}' (direct | pumped)"
                    )))
                }
            };
        }
        if let Some(s) = &raw.source {
            set(&mut exp.source.rep_rate_mhz, s.rep_rate_mhz);
            set(&mut exp.source.mean_pairs, s.mean_pairs);
            if let Some(d) = &s.pair_distribution {
                exp.source.pair_distribution = match d.as_str() {
                    "thermal" => PairDistribution::Thermal,
                    "poisson" => PairDistribution::Poisson,
                    other => {
                        return Err(CoreError::Config(format!(
                            "source: unknown pair_distribution '{other}' (thermal | poisson)"
                        )))
                    }
                };
            }
            set(&mut exp.source.spurious_mode_fraction, s.spurious_mode_fraction);
            set(&mut exp.source.signal_path_efficiency, s.signal_path_efficiency);
            set(&mut exp.source.idler_path_efficiency, s.idler_path_efficiency);
            set(&mut exp.source.dark_rate_signal_hz, s.dark_rate_signal_hz);
            set(&mut exp.source.dark_rate_idler_hz, s.dark_rate_idler_hz);
            set(&mut exp.source.jitter_fwhm_ps, s.jitter_fwhm_ps);
        }
        if let Some(t) = &raw.timing {
            set(&mut exp.timing.pump_ms, t.pump_ms);
            set(&mut exp.timing.wait_ms, t.wait_ms);
            set(&mut exp.timing.store_ms, t.store_ms);
            set(&mut exp.timing.cycles, t.cycles);
        }
        if let Some(l) = &raw.levels {
            set(&mut exp.levels.field_g, l.field_g);
            set(
                &mut exp.levels.electronic_zeeman_slope_mhz_per_g,
                l.electronic_zeeman_slope_mhz_per_g,
            );
        }
        let mut decay_name = "none".to_string();
        if let Some(r) = &raw.run {
            set(&mut exp.input_fwhm_ghz, r.input_fwhm_ghz);
            set(&mut exp.g2_half_window_ns, r.g2_half_window_ns);
            set(&mut exp.accidental_periods, r.accidental_periods);
            set(&mut exp.repump_each_cycle, r.repump_each_cycle);
            if let Some(d) = &r.decay {
                decay_name = d.clone();
                exp.decay = match d.as_str() {
                    "none" => None,
                    "low_field" => Some(HoleDecayModel::low_field()),
                    "high_field" => Some(HoleDecayModel::high_field()),
                    other => {
                        return Err(CoreError::Config(format!(
                            "run: unknown decay '{other}' (none | low_field | high_field)"
                        )))
                    }
                };
            }
        }
        let mut burn = BurnParams::default();
        if let Some(b) = &raw.burn {
            set(&mut burn.center_mhz, b.center_mhz);
            set(&mut burn.width_mhz, b.width_mhz);
            set(&mut burn.strength, b.strength);
            set(&mut burn.branching, b.branching);
            set(&mut burn.line_od, b.line_od);
            set(&mut burn.span_mhz, b.span_mhz);
            set(&mut burn.step_mhz, b.step_mhz);
        }

        exp.validate()?;
        let seed = cli_seed.or(raw.seed).ok_or_else(|| {
            CoreError::Config("seed is required (--seed or `seed =` in the config file)".into())
        })?;
        Ok(RunConfig { seed, experiment: exp, burn, decay_name })
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
