//! Atomic-frequency-comb construction and the analytic first-order recall
//! efficiency.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::SpectralGrid;
use crate::spectral::holes::BurnOptions;
use crate::spectral::levels::{side_hole_detunings, LevelStructure};

pub const MAX_GRID_SAMPLES: usize = 1 << 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToothShape {
    Square,
    Gaussian,
}

/// Parametric comb description. `peak_od` is the absolute tooth-peak optical
/// depth and `background_od` the residual trough depth; the tooth contrast
/// `peak_od - background_od` is what drives the echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombSpec {
    pub bandwidth_ghz: f64,
    /// Tooth spacing (MHz); storage time is 1000/delta ns.
    pub delta_mhz: f64,
    /// Finesse F = delta / gamma (tooth spacing over tooth width).
    pub finesse: f64,
    pub peak_od: f64,
    pub background_od: f64,
    pub tooth_shape: ToothShape,
}

impl CombSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_mhz > 0.0) {
            return Err(CoreError::Config("comb: delta must be > 0".into()));
        }
        if !(self.finesse > 1.0) {
            return Err(CoreError::Config("comb: finesse must be > 1".into()));
        }
        if self.bandwidth_ghz * 1000.0 < self.delta_mhz {
            return Err(CoreError::Config("comb: bandwidth must be >= delta".into()));
        }
        if self.background_od < 0.0 || self.peak_od < self.background_od {
            return Err(CoreError::Config(
                "comb: need peak_od >= background_od >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn tooth_width_mhz(&self) -> f64 {
        self.delta_mhz / self.finesse
    }

    pub fn contrast(&self) -> f64 {
        self.peak_od - self.background_od
    }

    pub fn storage_time_ns(&self) -> f64 {
        1000.0 / self.delta_mhz
    }
}

/// Render the comb onto a uniform grid with at least 32 samples per tooth.
/// Square teeth get fractional edge coverage so the integrated tooth area is
/// resolution independent.
pub fn build_comb(spec: &CombSpec) -> Result<SpectralGrid> {
    spec.validate()?;
    let gamma = spec.tooth_width_mhz();
    let per_period = ((spec.delta_mhz / (gamma / 32.0)).ceil() as usize).max(2);
    let step = spec.delta_mhz / per_period as f64;
    let n_periods = ((spec.bandwidth_ghz * 1000.0 / spec.delta_mhz).round() as usize).max(1);
    let total = n_periods * per_period + 1;
    if total > MAX_GRID_SAMPLES {
        return Err(CoreError::Resource {
            required: total,
            detail: format!(
                "comb grid for bandwidth {} GHz at finesse {}",
                spec.bandwidth_ghz, spec.finesse
            ),
        });
    }
    let half = (total - 1) as f64 / 2.0 * step;
    let contrast = spec.contrast();
    let od: Vec<f64> = (0..total)
        .map(|i| {
            let f = -half + step * i as f64;
            // teeth centered at (k + 1/2) delta from the band start, so the
            // band holds exactly n_periods whole teeth with troughs at edges
            let p = (f + half) / spec.delta_mhz;
            let k = (p - 0.5).round().clamp(0.0, (n_periods - 1) as f64);
            let u = (p - 0.5 - k) * spec.delta_mhz;
            let t = match spec.tooth_shape {
                ToothShape::Square => {
                    // overlap of the sample cell [u-step/2, u+step/2] with the tooth
                    let lo = (u - step / 2.0).max(-gamma / 2.0);
                    let hi = (u + step / 2.0).min(gamma / 2.0);
                    ((hi - lo) / step).clamp(0.0, 1.0)
                }
                ToothShape::Gaussian => {
                    let sigma = gamma / (8.0 * 2f64.ln()).sqrt();
                    let g = |x: f64| (-(x * x) / (2.0 * sigma * sigma)).exp();
                    g(u) + g(u - spec.delta_mhz) + g(u + spec.delta_mhz)
                }
            };
            spec.background_od + contrast * t
        })
        .collect();
    SpectralGrid::new(-half, step, od)
}

/// First-order (m = 1) forward-recall efficiency of the comb.
///
/// Uses the tooth contrast d = peak - background; the residual background
/// only attenuates (`exp(-d0)`), a flat absorber produces no echo.
pub fn analytic_efficiency(spec: &CombSpec) -> f64 {
    let d1 = spec.contrast() / spec.finesse;
    let shape = match spec.tooth_shape {
        ToothShape::Square => {
            let x = std::f64::consts::PI / spec.finesse;
            let s = if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
            s * s
        }
        ToothShape::Gaussian => (-7.0 / (spec.finesse * spec.finesse)).exp(),
    };
    d1 * d1 * (-d1).exp() * shape * (-spec.background_od).exp()
}

/// Linear taper of the tooth contrast across the band, modelling the limited
/// pump intensity at large detunings. `fraction` = 1 tapers the contrast to
/// zero at the band edges.
pub fn apply_taper(grid: &SpectralGrid, background_od: f64, fraction: f64) -> Result<SpectralGrid> {
    if !(0.0..=2.0).contains(&fraction) {
        return Err(CoreError::invalid("taper fraction must be in [0, 2]"));
    }
    let half = grid.end_mhz().abs().max(grid.start_mhz().abs());
    let od: Vec<f64> = (0..grid.len())
        .map(|i| {
            let scale = (1.0 - fraction * grid.detuning(i).abs() / half).max(0.0);
            background_od + (grid.od()[i] - background_od).max(0.0) * scale
        })
        .collect();
    SpectralGrid::new(grid.start_mhz(), grid.step_mhz(), od)
}

/// Periodic pump intensity pattern used for swept-beam comb preparation.
#[derive(Debug, Clone)]
pub struct PumpPattern {
    pub period_mhz: f64,
    /// Relative intensity over one period (>= 0), sampled uniformly.
    pub intensity: Vec<f64>,
    /// Saturation parameter at unit relative intensity.
    pub peak_strength: f64,
}

impl PumpPattern {
    /// Square-wave pattern burning troughs of width `period (1 - 1/finesse)`.
    pub fn square(period_mhz: f64, finesse: f64, peak_strength: f64) -> Self {
        let n = 256;
        let duty = 1.0 - 1.0 / finesse; // fraction of the period that is pumped
        let intensity = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64; // 0..1, tooth centered at 0
                let x = (u - (u).round()).abs(); // distance from tooth center in periods
                if x > (1.0 - duty) / 2.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        PumpPattern { period_mhz, intensity, peak_strength }
    }

    pub fn uniform(peak_strength: f64) -> Self {
        PumpPattern { period_mhz: 1.0, intensity: vec![1.0], peak_strength }
    }

    fn at(&self, f_mhz: f64) -> f64 {
        let u = f_mhz / self.period_mhz;
        let frac = u - u.floor();
        let idx = (frac * self.intensity.len() as f64) as usize % self.intensity.len();
        self.peak_strength * self.intensity[idx]
    }
}

/// Simulate swept-pump comb preparation on an absorption line: the pump sweeps
/// the window applying the intensity pattern; each pumped frequency also burns
/// side-holes at the excited-level splittings (crosstalk between teeth).
pub fn comb_from_pumping(
    line: &SpectralGrid,
    sweep_bandwidth_ghz: f64,
    pattern: &PumpPattern,
    levels: &LevelStructure,
    opts: &BurnOptions,
) -> Result<SpectralGrid> {
    let half = sweep_bandwidth_ghz * 1000.0 / 2.0;
    if !line.contains(-half) || !line.contains(half) {
        return Err(CoreError::invalid(
            "sweep window extends beyond the absorption line support",
        ));
    }
    levels.validate()?;
    let side = side_hole_detunings(levels);
    let n_species = levels.species.len().max(1);
    let w_species = 1.0 / n_species as f64;
    let floor = opts.transparency_floor;
    let in_window = |f: f64| f.abs() <= half;
    let od: Vec<f64> = (0..line.len())
        .map(|i| {
            let f = line.detuning(i);
            let mut sat = 0.0;
            if in_window(f) {
                sat += pattern.at(f);
            }
            // crosstalk: pump light at f -/+ delta_side burns this frequency
            for feat in &side {
                let src = f - feat.detuning_mhz;
                if in_window(src) {
                    sat += opts.side_hole_weight * w_species * pattern.at(src);
                }
            }
            let pumpable = (line.od()[i] - floor).max(0.0);
            floor + pumpable / (1.0 + sat)
        })
        .collect();
    SpectralGrid::new(line.start_mhz(), line.step_mhz(), od)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::levels::linbo3_levels;

    fn paper_spec() -> CombSpec {
        CombSpec {
            bandwidth_ghz: 6.0,
            delta_mhz: 1000.0 / 48.0,
            finesse: 2.0,
            peak_od: 1.2,
            background_od: 0.7,
            tooth_shape: ToothShape::Square,
        }
    }

    #[test]
    fn paper_comb_has_288_teeth() {
        let spec = paper_spec();
        let grid = build_comb(&spec).unwrap();
        // count threshold crossings at half contrast
        let mid = spec.background_od + spec.contrast() / 2.0;
        let mut teeth = 0;
        let mut above = false;
        for &d in grid.od() {
            if d > mid && !above {
                teeth += 1;
                above = true;
            } else if d < mid {
                above = false;
            }
        }
        assert_eq!(teeth, 288);
    }

    #[test]
    fn degenerate_comb_is_flat() {
        let spec = CombSpec { peak_od: 0.7, ..paper_spec() };
        let grid = build_comb(&spec).unwrap();
        assert!(grid.od().iter().all(|&d| (d - 0.7).abs() < 1e-12));
    }

    #[test]
    fn high_finesse_troughs_at_background() {
        let spec = CombSpec { finesse: 64.0, bandwidth_ghz: 0.5, ..paper_spec() };
        let grid = build_comb(&spec).unwrap();
        let below = grid
            .od()
            .iter()
            .filter(|&&d| (d - spec.background_od).abs() < 1e-9)
            .count();
        assert!(below as f64 / grid.len() as f64 > 0.9);
    }

    #[test]
    fn resolution_error_reports_requirement() {
        let spec = CombSpec { finesse: 1e4, bandwidth_ghz: 6.0, ..paper_spec() };
        match build_comb(&spec) {
            Err(CoreError::Resource { required, .. }) => assert!(required > MAX_GRID_SAMPLES),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn ideal_efficiency_peaks_at_54_percent() {
        // d0 = 0, high finesse, optimum at contrast/F = 2
        let finesse = 1000.0;
        let mut best = 0.0f64;
        for i in 0..400 {
            let d = finesse * (1.0 + i as f64 * 0.005);
            let spec = CombSpec {
                bandwidth_ghz: 6.0,
                delta_mhz: 20.0,
                finesse,
                peak_od: d,
                background_od: 0.0,
                tooth_shape: ToothShape::Square,
            };
            best = best.max(analytic_efficiency(&spec));
        }
        let eta_max = 4.0 * (-2.0f64).exp(); // 0.5413
        assert!((best - eta_max).abs() < 1e-3, "best {best}");
    }

    #[test]
    fn zero_contrast_zero_efficiency() {
        let spec = CombSpec { peak_od: 0.7, ..paper_spec() };
        assert_eq!(analytic_efficiency(&spec), 0.0);
    }

    #[test]
    fn efficiency_decreases_with_background() {
        let a = analytic_efficiency(&paper_spec());
        let b = analytic_efficiency(&CombSpec {
            background_od: 0.9,
            peak_od: 1.4,
            ..paper_spec()
        });
        assert!(b < a);
    }

    #[test]
    fn uniform_sweep_burns_a_trench() {
        let line = SpectralGrid::flat(4000.0, 2.0, 2.0).unwrap();
        let out = comb_from_pumping(
            &line,
            6.0,
            &PumpPattern::uniform(1e6),
            &linbo3_levels(0.0),
            &BurnOptions::default(),
        )
        .unwrap();
        let i = out.index_of(0.0).unwrap();
        assert!(out.od()[i] < 1e-4);
        let j = out.index_of(3500.0).unwrap();
        assert!((out.od()[j] - 2.0).abs() < 1e-9, "outside the sweep untouched");
    }

    #[test]
    fn zero_power_leaves_line_unchanged() {
        let line = SpectralGrid::flat(4000.0, 2.0, 2.0).unwrap();
        let out = comb_from_pumping(
            &line,
            6.0,
            &PumpPattern::uniform(0.0),
            &linbo3_levels(16_500.0),
            &BurnOptions::default(),
        )
        .unwrap();
        assert_eq!(line.od(), out.od());
    }

    #[test]
    fn commensurate_period_deepens_troughs() {
        // With the comb period equal to the side-hole splitting, crosstalk
        // from one trough lands on the next trough and deepens it; with the
        // splitting an odd multiple of half a period it lands on teeth and
        // the troughs stay shallower.
        let line = SpectralGrid::flat(600.0, 0.25, 2.0).unwrap();
        let split = 1.721e-3 * 16_500.0; // 28.4 MHz
        let levels = crate::spectral::levels::LevelStructure {
            electronic_zeeman_slope_mhz_per_g: 1.6,
            species: vec![crate::spectral::levels::SpinSpecies {
                name: "li7".into(),
                slope_ground_khz_per_g: 1.721,
                slope_excited_khz_per_g: 1.721,
                nuclear_spin_twice: 3,
            }],
            field_g: 16_500.0,
        };
        let run = |period: f64| {
            let g = comb_from_pumping(
                &line,
                0.8,
                &PumpPattern::square(period, 2.0, 30.0),
                &levels,
                &BurnOptions::default(),
            )
            .unwrap();
            // average OD at trough centers (half-period offsets) across the band
            let mut s = 0.0;
            let mut n = 0;
            for k in -6..6 {
                let f = (k as f64 + 0.5) * period;
                if f.abs() < 390.0 {
                    s += g.od_at(f);
                    n += 1;
                }
            }
            s / n as f64
        };
        let tc = run(split);
        let ti = run(2.0 * split / 3.0);
        assert!(tc < ti, "commensurate troughs {tc} vs incommensurate {ti}");
    }
}
