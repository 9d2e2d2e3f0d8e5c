//! Time-resolved hole relaxation. The hole depth decays as a weighted pair of
//! exponentials: a fast field-independent component (~60 ms) and a slow
//! field-dependent one (1.0-2.44 s at low fields; minutes-long population
//! trapping in superhyperfine levels at high fields).

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::SpectralGrid;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoleDecayModel {
    pub fast_lifetime_s: f64,
    pub slow_lifetime_s: f64,
    pub weight_fast: f64,
    /// High-field superhyperfine trap lifetime (the 10-minute holes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persistent_lifetime_s: Option<f64>,
}

impl HoleDecayModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.fast_lifetime_s > 0.0) || !(self.slow_lifetime_s > 0.0) {
            return Err(CoreError::invalid("decay lifetimes must be > 0"));
        }
        if self.fast_lifetime_s >= self.slow_lifetime_s {
            return Err(CoreError::invalid("fast lifetime must be < slow lifetime"));
        }
        if !(0.0..=1.0).contains(&self.weight_fast) {
            return Err(CoreError::invalid("weight_fast must be in [0, 1]"));
        }
        if let Some(p) = self.persistent_lifetime_s {
            if !(p > 0.0) {
                return Err(CoreError::invalid("persistent lifetime must be > 0"));
            }
        }
        Ok(())
    }

    /// Surviving fraction of the initial hole depth after `delay` seconds.
    pub fn decay_factor(&self, delay_s: f64) -> f64 {
        self.weight_fast * (-delay_s / self.fast_lifetime_s).exp()
            + (1.0 - self.weight_fast) * (-delay_s / self.slow_lifetime_s).exp()
    }

    /// Low-field model at 0.8 kG: 60 ms fast decay, 2.44 s slow decay.
    pub fn low_field() -> Self {
        HoleDecayModel {
            fast_lifetime_s: 0.060,
            slow_lifetime_s: 2.44,
            weight_fast: 0.5,
            persistent_lifetime_s: None,
        }
    }

    /// High-field (16.5-19 kG) model: population trapped in superhyperfine
    /// levels with a 10-minute lifetime.
    pub fn high_field() -> Self {
        HoleDecayModel {
            fast_lifetime_s: 0.060,
            slow_lifetime_s: 600.0,
            weight_fast: 0.05,
            persistent_lifetime_s: Some(600.0),
        }
    }
}

/// Scale the deviation of `grid` from `baseline` by the decay factor.
pub fn relax(
    grid: &SpectralGrid,
    baseline: &SpectralGrid,
    delay_s: f64,
    model: &HoleDecayModel,
) -> Result<SpectralGrid> {
    if delay_s < 0.0 {
        return Err(CoreError::invalid("delay must be >= 0"));
    }
    if !grid.same_axis(baseline) {
        return Err(CoreError::invalid("grid and baseline axes differ"));
    }
    model.validate()?;
    let f = model.decay_factor(delay_s);
    let od: Vec<f64> = grid
        .od()
        .iter()
        .zip(baseline.od())
        .map(|(&g, &b)| (b + (g - b) * f).max(0.0))
        .collect();
    SpectralGrid::new(grid.start_mhz(), grid.step_mhz(), od)
}
