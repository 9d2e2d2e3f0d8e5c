//! End-to-end experiment orchestration: the prepare / wait / store timing
//! cycle, wiring comb preparation to the photon-counting layer, and the
//! figure-shaped dataset exports.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::afc::{
    analytic_efficiency, apply_taper, build_comb, comb_from_pumping, echo_analysis, propagate,
    transfer_function, CombSpec, EchoResult, PumpPattern, Pulse, ToothShape,
};
use crate::error::{CoreError, Result};
use crate::grid::SpectralGrid;
use crate::photon::{
    build_histogram, g2_from_histogram, simulate_run, symmetric_offsets, CoincidenceHistogram,
    G2Estimate, MemoryChannel, PairDistribution, SourceConfig,
};
use crate::rng::Rng;
use crate::spectral::{
    burn_hole_with, fit_side_hole_slope, linbo3_levels, relax, side_hole_detunings, BurnOptions,
    HoleDecayModel, LevelStructure,
};

/// Prepare / wait / store cycle durations. The wait lets the excited state
/// empty before single photons arrive; it is modeled only as hole relaxation
/// time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingSequence {
    pub pump_ms: f64,
    pub wait_ms: f64,
    pub store_ms: f64,
    pub cycles: u32,
}

impl TimingSequence {
    pub fn validate(&self) -> Result<()> {
        if !(self.pump_ms > 0.0) || !(self.wait_ms > 0.0) || !(self.store_ms > 0.0) {
            return Err(CoreError::Config("timing: all durations must be > 0".into()));
        }
        Ok(())
    }

    pub fn cycle_s(&self) -> f64 {
        (self.pump_ms + self.wait_ms + self.store_ms) * 1e-3
    }
}

impl Default for TimingSequence {
    fn default() -> Self {
        TimingSequence { pump_ms: 300.0, wait_ms: 30.0, store_ms: 200.0, cycles: 1 }
    }
}

/// How the comb is obtained: rendered directly from its parametric
/// description, or prepared by simulated swept optical pumping of a flat
/// absorption line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum CombRecipe {
    Direct {
        spec: CombSpec,
        /// Linear contrast taper toward the band edges (pump non-uniformity);
        /// 1 tapers to zero contrast at the edge, above 1 the contrast hits
        /// zero before the edge.
        taper_fraction: f64,
    },
    Pumped {
        spec: CombSpec,
        line_od: f64,
        pump_strength: f64,
    },
}

impl CombRecipe {
    pub fn spec(&self) -> &CombSpec {
        match self {
            CombRecipe::Direct { spec, .. } | CombRecipe::Pumped { spec, .. } => spec,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec().validate()?;
        match self {
            CombRecipe::Direct { taper_fraction, .. } => {
                if !(0.0..=2.0).contains(taper_fraction) {
                    return Err(CoreError::Config("comb: taper_fraction must be in [0, 2]".into()));
                }
            }
            CombRecipe::Pumped { line_od, pump_strength, .. } => {
                if !(*line_od > 0.0) || !(*pump_strength > 0.0) {
                    return Err(CoreError::Config(
                        "comb: pumped recipe needs line_od > 0 and pump_strength > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Render the prepared comb grid.
    pub fn prepare(&self, levels: &LevelStructure, opts: &BurnOptions) -> Result<SpectralGrid> {
        match self {
            CombRecipe::Direct { spec, taper_fraction } => {
                let comb = build_comb(spec)?;
                apply_taper(&comb, spec.background_od, *taper_fraction)
            }
            CombRecipe::Pumped { spec, line_od, pump_strength } => {
                let half = spec.bandwidth_ghz * 1000.0 / 2.0;
                let gamma = spec.tooth_width_mhz();
                let step = gamma / 32.0;
                let line = SpectralGrid::flat(half + 10.0 * gamma, step, *line_od)?;
                let pattern = PumpPattern::square(spec.delta_mhz, spec.finesse, *pump_strength);
                comb_from_pumping(&line, spec.bandwidth_ghz, &pattern, levels, opts)
            }
        }
    }

    /// The unburned line the comb relaxes back toward.
    fn baseline_od(&self) -> f64 {
        match self {
            CombRecipe::Direct { spec, .. } => spec.peak_od,
            CombRecipe::Pumped { line_od, .. } => *line_od,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub levels: LevelStructure,
    pub recipe: CombRecipe,
    pub source: SourceConfig,
    pub timing: TimingSequence,
    /// FWHM of the Lorentzian input photon spectrum, GHz.
    pub input_fwhm_ghz: f64,
    /// Hole relaxation between preparation and the store window; `None`
    /// freezes the comb.
    pub decay: Option<HoleDecayModel>,
    /// Re-run the preparation step every cycle (the default); disabling it
    /// lets the comb degrade cumulatively for relaxation studies.
    pub repump_each_cycle: bool,
    pub g2_half_window_ns: f64,
    /// Accidental windows per side for the g2 estimate.
    pub accidental_periods: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.levels.validate()?;
        self.recipe.validate()?;
        self.source.validate()?;
        self.timing.validate()?;
        if !(self.input_fwhm_ghz > 0.0) {
            return Err(CoreError::Config("experiment: input_fwhm must be > 0".into()));
        }
        if let Some(d) = &self.decay {
            d.validate()?;
        }
        if !(self.g2_half_window_ns > 0.0)
            || 2.0 * self.g2_half_window_ns >= self.source.period_ns()
        {
            return Err(CoreError::Config(
                "experiment: g2 window must be positive and below one pump period".into(),
            ));
        }
        if self.accidental_periods == 0 {
            return Err(CoreError::Config("experiment: need at least one accidental period".into()));
        }
        Ok(())
    }
}

/// Defaults matching the published storage experiment: 6 GHz comb, 48 ns
/// storage, thermal pairs at 80 MHz with 0.05 mean pairs per pulse, 20%
/// waveguide coupling times 50% detector efficiency on the memory arm.
pub fn paper_preset() -> ExperimentConfig {
    ExperimentConfig {
        levels: linbo3_levels(16_500.0),
        recipe: CombRecipe::Direct {
            spec: CombSpec {
                bandwidth_ghz: 6.0,
                delta_mhz: 1000.0 / 48.0,
                finesse: 2.0,
                peak_od: 1.2,
                background_od: 0.7,
                tooth_shape: ToothShape::Square,
            },
            taper_fraction: 1.4,
        },
        source: SourceConfig {
            rep_rate_mhz: 80.0,
            mean_pairs: 0.05,
            pair_distribution: PairDistribution::Thermal,
            spurious_mode_fraction: 0.1,
            signal_path_efficiency: 0.008,
            idler_path_efficiency: 0.2 * 0.5,
            dark_rate_signal_hz: 100.0,
            dark_rate_idler_hz: 12_000.0,
            jitter_fwhm_ps: 100.0,
        },
        timing: TimingSequence { cycles: 12, ..Default::default() },
        input_fwhm_ghz: 6.0,
        decay: None,
        repump_each_cycle: true,
        g2_half_window_ns: 1.5,
        accidental_periods: 3,
    }
}

/// Reduce a prepared comb grid to the per-photon channel: band-averaged
/// transmission and first-order recall efficiency, weighted by the Lorentzian
/// input photon spectrum.
pub fn derive_channel(
    grid: &SpectralGrid,
    spec: &CombSpec,
    input_fwhm_ghz: f64,
) -> Result<MemoryChannel> {
    spec.validate()?;
    if !(input_fwhm_ghz > 0.0) {
        return Err(CoreError::invalid("input spectrum width must be > 0"));
    }
    let hw = input_fwhm_ghz * 500.0; // half width in MHz
    let weight = |f: f64| 1.0 / (1.0 + (f / hw) * (f / hw));

    // Per-period statistics from local peak / trough optical depths. The
    // transmitted (t = 0) intensity of a structure much wider than the tooth
    // spacing is the squared DC amplitude exp(-(d0 + contrast/F)), not the
    // spectral mean of exp(-od); the difference is carried by the echo train.
    let mut we = 0.0;
    let mut echo = 0.0;
    let mut transmit = 0.0;
    let mut f = grid.start_mhz();
    while f + spec.delta_mhz <= grid.end_mhz() + 1e-9 {
        let lo = grid.index_of(f.max(grid.start_mhz()))?;
        let hi = grid.index_of((f + spec.delta_mhz).min(grid.end_mhz()))?;
        if hi > lo {
            let seg = &grid.od()[lo..=hi];
            let peak = seg.iter().cloned().fold(f64::MIN, f64::max);
            let trough = seg.iter().cloned().fold(f64::MAX, f64::min);
            let local = CombSpec { peak_od: peak, background_od: trough, ..spec.clone() };
            let w = weight(f + spec.delta_mhz / 2.0);
            we += w;
            echo += w * analytic_efficiency(&local);
            transmit += w * (-(trough + local.contrast() / spec.finesse)).exp();
        }
        f += spec.delta_mhz;
    }
    if we == 0.0 {
        return Err(CoreError::invalid("comb grid narrower than one tooth period"));
    }
    echo /= we;
    transmit /= we;

    let channel = MemoryChannel {
        transmit_prob: transmit.clamp(0.0, 1.0),
        echo_prob: echo,
        storage_time_ns: spec.storage_time_ns(),
    };
    channel.validate()?;
    Ok(channel)
}

/// Everything one sequence run produces. With zero cycles only the comb and
/// channel are populated.
#[derive(Debug, Clone, Serialize)]
pub struct RunBundle {
    pub comb_section: Vec<(f64, f64)>,
    pub channel: MemoryChannel,
    pub echo: Option<EchoResult>,
    pub histogram: Option<CoincidenceHistogram>,
    pub g2_transmitted: Option<G2Estimate>,
    pub g2_echo: Option<G2Estimate>,
    pub pulses: u64,
}

/// Seed of cycle `k`, derived so cycles are independent streams.
pub fn cycle_seed(seed: u64, cycle: u32) -> u64 {
    Rng::split(seed, 0x5e9_u64 ^ cycle as u64).next_u64()
}

/// Run the full prepare / wait / store sequence and aggregate photon
/// statistics over all cycles. Deterministic per seed.
pub fn run_sequence(cfg: &ExperimentConfig, seed: u64) -> Result<RunBundle> {
    cfg.validate()?;
    let spec = cfg.recipe.spec();
    let opts = BurnOptions::default();
    let comb0 = cfg.recipe.prepare(&cfg.levels, &opts)?;
    let baseline =
        SpectralGrid::new(comb0.start_mhz(), comb0.step_mhz(), vec![cfg.recipe.baseline_od(); comb0.len()])?;

    let period = cfg.source.period_ns();
    let tau = spec.storage_time_ns();
    let offsets = symmetric_offsets(cfg.accidental_periods);
    let extra = (cfg.accidental_periods + 1) as f64 * period;
    let hist_start = -extra;
    let bin_ns = 0.1;
    let bins = ((tau + 2.0 * extra) / bin_ns).ceil() as usize;

    let mut histogram: Option<CoincidenceHistogram> = None;
    let mut pulses = 0u64;
    let mut channel = derive_channel(&comb0, spec, cfg.input_fwhm_ghz)?;
    for k in 0..cfg.timing.cycles {
        let comb = match (&cfg.decay, cfg.repump_each_cycle) {
            (None, _) => comb0.clone(),
            (Some(model), true) => relax(&comb0, &baseline, cfg.timing.wait_ms * 1e-3, model)?,
            (Some(model), false) => {
                // the pump step is skipped after cycle 0, only wait + store
                // elapse between store windows
                let elapsed =
                    (cfg.timing.wait_ms + k as f64 * (cfg.timing.wait_ms + cfg.timing.store_ms))
                        * 1e-3;
                relax(&comb0, &baseline, elapsed, model)?
            }
        };
        channel = derive_channel(&comb, spec, cfg.input_fwhm_ghz)?;
        let record =
            simulate_run(&cfg.source, &channel, cfg.timing.store_ms * 1e-3, cycle_seed(seed, k))?;
        pulses += (cfg.timing.store_ms * 1e-3 * cfg.source.rep_rate_mhz * 1e6).floor() as u64;
        let h = build_histogram(&record, hist_start, bin_ns, bins)?;
        histogram = Some(match histogram {
            None => h,
            Some(mut acc) => {
                for (a, b) in acc.counts.iter_mut().zip(&h.counts) {
                    *a += b;
                }
                acc.total_pairs += h.total_pairs;
                acc
            }
        });
    }

    let (g2_transmitted, g2_echo, echo) = match &histogram {
        None => (None, None, None),
        Some(h) => {
            let g2t = g2_from_histogram(h, 0.0, cfg.g2_half_window_ns, period, &offsets).ok();
            let g2e = g2_from_histogram(h, tau, cfg.g2_half_window_ns, period, &offsets).ok();
            (g2t, g2e, Some(pulse_echo_result(&comb0, spec)?))
        }
    };

    Ok(RunBundle {
        comb_section: comb_section(&comb0, 100.0),
        channel,
        echo,
        histogram,
        g2_transmitted,
        g2_echo,
        pulses,
    })
}

/// Field-level check of the prepared comb: propagate a short probe pulse and
/// integrate the transmitted and echoed energy.
pub fn pulse_echo_result(grid: &SpectralGrid, spec: &CombSpec) -> Result<EchoResult> {
    let tau = spec.storage_time_ns();
    let tf = transfer_function(grid)?;
    let rate = (4.0 * spec.bandwidth_ghz).max(40.0 / tau);
    let span = 16.0 * tau;
    // probe short against the storage time but spectrally inside the band
    let fwhm = (tau / 60.0).max(1.9 / spec.bandwidth_ghz);
    let input = Pulse::gaussian(fwhm, 4.0 * tau, span, rate, 0.0)?;
    let output = propagate(&input, &tf)?;
    echo_analysis(&input, &output, spec.delta_mhz, 2.0)
}

/// (detuning, od) samples of the central +/- `half_mhz` of the comb.
pub fn comb_section(grid: &SpectralGrid, half_mhz: f64) -> Vec<(f64, f64)> {
    (0..grid.len())
        .filter(|&i| grid.detuning(i).abs() <= half_mhz)
        .map(|i| (grid.detuning(i), grid.od()[i]))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    HoleSpectrum,
    SlopesVsField,
    CombSection,
    Coincidences,
}

impl std::str::FromStr for FigureId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2a" => Ok(FigureId::HoleSpectrum),
            "2b" => Ok(FigureId::SlopesVsField),
            "3" => Ok(FigureId::CombSection),
            "4" => Ok(FigureId::Coincidences),
            other => Err(CoreError::invalid(format!(
                "unknown figure '{other}' (supported: 2a, 2b, 3, 4)"
            ))),
        }
    }
}

/// One fitted side-hole slope series of the slope-vs-field dataset.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub species: String,
    pub true_slope_khz_per_g: f64,
    pub fitted_slope_khz_per_g: f64,
    pub std_error_khz_per_g: f64,
    pub points: Vec<(f64, f64)>,
}

/// Synthetic side-hole position measurements over a field sweep, with 0.1 MHz
/// read-off noise, refitted per species.
pub fn slope_fits(levels: &LevelStructure, seed: u64) -> Result<Vec<SlopeFit>> {
    let fields: Vec<f64> = (0..8).map(|i| 6_000.0 + 2_000.0 * i as f64).collect();
    let mut rng = Rng::split(seed, 0x2b);
    let noise_mhz = 0.1;
    let mut out = Vec::new();
    for sp in &levels.species {
        let mut points = Vec::new();
        for &b in &fields {
            let detuned = side_hole_detunings(&levels.with_field(b));
            let pos = detuned
                .iter()
                .find(|f| f.species == sp.name && f.detuning_mhz >= 0.0)
                .map(|f| f.detuning_mhz)
                .unwrap_or(0.0);
            points.push((b, pos + noise_mhz * rng.normal()));
        }
        let (slope_khz_per_g, err_khz_per_g) = fit_side_hole_slope(&points)?;
        out.push(SlopeFit {
            species: sp.name.clone(),
            true_slope_khz_per_g: sp.slope_excited_khz_per_g,
            fitted_slope_khz_per_g: slope_khz_per_g,
            std_error_khz_per_g: err_khz_per_g,
            points,
        });
    }
    Ok(out)
}

fn write_xy_csv(path: &Path, header: &str, rows: &[(f64, f64)]) -> Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for (x, y) in rows {
        writeln!(f, "{x},{y}")?;
    }
    Ok(())
}

/// Write the datasets of one published figure into `dir`; returns the files
/// produced.
pub fn reproduce_figure(id: FigureId, dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    match id {
        FigureId::HoleSpectrum => {
            let levels = linbo3_levels(16_500.0);
            let line = SpectralGrid::flat(60.0, 0.05, 2.0)?;
            let (burned, features) =
                burn_hole_with(&line, 0.0, 1.0, 20.0, &levels, 0.9, &BurnOptions::default())?;
            let spectrum = dir.join("hole_spectrum.csv");
            burned.write_csv(&spectrum)?;
            let feat = dir.join("hole_features.json");
            let rows: Vec<serde_json::Value> = features
                .iter()
                .map(|f| {
                    serde_json::json!({
                        "kind": format!("{:?}", f.kind),
                        "species": f.species,
                        "detuning_MHz": f.detuning_mhz,
                        "depth_od": f.depth_od,
                        "width_MHz": f.width_mhz,
                    })
                })
                .collect();
            std::fs::write(&feat, serde_json::to_string_pretty(&rows)?)?;
            files.extend([spectrum, feat]);
        }
        FigureId::SlopesVsField => {
            let fits = slope_fits(&linbo3_levels(16_500.0), seed)?;
            for fit in &fits {
                let path = dir.join(format!("side_hole_positions_{}.csv", fit.species));
                write_xy_csv(&path, "field_G,detuning_MHz", &fit.points)?;
                files.push(path);
            }
            let path = dir.join("slope_fits.json");
            std::fs::write(&path, serde_json::to_string_pretty(&fits)?)?;
            files.push(path);
        }
        FigureId::CombSection => {
            let cfg = paper_preset();
            let comb = cfg.recipe.prepare(&cfg.levels, &BurnOptions::default())?;
            let path = dir.join("comb_section.csv");
            write_xy_csv(&path, "detuning_MHz,od", &comb_section(&comb, 100.0))?;
            files.push(path);
        }
        FigureId::Coincidences => {
            let mut cfg = paper_preset();
            cfg.timing.cycles = 2;
            let bundle = run_sequence(&cfg, seed)?;
            let hist = bundle.histogram.as_ref().expect("cycles > 0");
            let path = dir.join("coincidence_histogram.csv");
            let rows: Vec<(f64, f64)> = hist
                .counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (hist.bin_center_ns(i), c as f64))
                .collect();
            write_xy_csv(&path, "delay_ns,counts", &rows)?;
            files.push(path);
            let path = dir.join("storage_summary.json");
            let summary = serde_json::json!({
                "storage_time_ns": bundle.channel.storage_time_ns,
                "transmit_prob": bundle.channel.transmit_prob,
                "echo_prob": bundle.channel.echo_prob,
                "pulses": bundle.pulses,
                "g2_transmitted": bundle.g2_transmitted,
                "g2_echo": bundle.g2_echo,
            });
            std::fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
            files.push(path);
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_channel_transparent_grid() {
        let g = SpectralGrid::flat(3000.0, 0.5, 0.0).unwrap();
        let spec = paper_preset().recipe.spec().clone();
        let ch = derive_channel(&g, &spec, 6.0).unwrap();
        assert!((ch.transmit_prob - 1.0).abs() < 1e-12);
        assert!(ch.echo_prob.abs() < 1e-12);
        assert!((ch.storage_time_ns - 48.0).abs() < 1e-9);
    }

    #[test]
    fn paper_channel_echo_near_0p3_percent() {
        let cfg = paper_preset();
        let comb = cfg.recipe.prepare(&cfg.levels, &BurnOptions::default()).unwrap();
        let ch = derive_channel(&comb, cfg.recipe.spec(), cfg.input_fwhm_ghz).unwrap();
        assert!(
            (0.0025..0.0035).contains(&ch.echo_prob),
            "band-averaged echo probability {}",
            ch.echo_prob
        );
        // untapered center tooth is close to 1%
        let untapered = analytic_efficiency(cfg.recipe.spec());
        assert!((0.008..0.012).contains(&untapered), "center efficiency {untapered}");
    }

    #[test]
    fn high_finesse_optimal_reaches_54_percent() {
        let spec = CombSpec {
            bandwidth_ghz: 2.0,
            delta_mhz: 20.0,
            finesse: 400.0,
            peak_od: 800.0,
            background_od: 0.0,
            tooth_shape: ToothShape::Square,
        };
        let comb = build_comb(&spec).unwrap();
        let ch = derive_channel(&comb, &spec, 1e6).unwrap();
        assert!((ch.echo_prob - 4.0 * (-2.0f64).exp()).abs() < 0.01, "echo {}", ch.echo_prob);
        // DC transmission at d/F = 2, d0 = 0
        assert!((ch.transmit_prob - (-2.0f64).exp()).abs() < 0.01, "transmit {}", ch.transmit_prob);
    }

    #[test]
    fn zero_cycles_yields_channel_only() {
        let mut cfg = paper_preset();
        cfg.timing.cycles = 0;
        let bundle = run_sequence(&cfg, 7).unwrap();
        assert!(bundle.histogram.is_none());
        assert!(bundle.g2_echo.is_none());
        assert_eq!(bundle.pulses, 0);
        assert!(!bundle.comb_section.is_empty());
    }

    #[test]
    fn single_cycle_matches_standalone_composition() {
        let mut cfg = paper_preset();
        cfg.decay = None;
        cfg.timing.cycles = 1;
        cfg.timing.store_ms = 2.0;
        let bundle = run_sequence(&cfg, 11).unwrap();

        let comb = cfg.recipe.prepare(&cfg.levels, &BurnOptions::default()).unwrap();
        let ch = derive_channel(&comb, cfg.recipe.spec(), cfg.input_fwhm_ghz).unwrap();
        let rec = simulate_run(&cfg.source, &ch, 2e-3, cycle_seed(11, 0)).unwrap();
        let h = bundle.histogram.unwrap();
        let h2 = build_histogram(&rec, h.start_ns, h.bin_ns, h.counts.len()).unwrap();
        assert_eq!(h.counts, h2.counts);
    }

    #[test]
    fn comb_degrades_monotonically_without_repump() {
        let mut cfg = paper_preset();
        cfg.decay = Some(HoleDecayModel::low_field());
        cfg.repump_each_cycle = false;
        cfg.timing.cycles = 3;
        cfg.timing.store_ms = 2.0;
        // compare the derived channel at each cycle via the internal schedule
        let comb0 = cfg.recipe.prepare(&cfg.levels, &BurnOptions::default()).unwrap();
        let baseline = SpectralGrid::new(
            comb0.start_mhz(),
            comb0.step_mhz(),
            vec![1.2; comb0.len()],
        )
        .unwrap();
        let model = HoleDecayModel::low_field();
        let mut last = f64::MAX;
        for k in 0..3u32 {
            let elapsed = (30.0 + k as f64 * 32.0) * 1e-3;
            let comb = relax(&comb0, &baseline, elapsed, &model).unwrap();
            let ch = derive_channel(&comb, cfg.recipe.spec(), cfg.input_fwhm_ghz).unwrap();
            assert!(ch.echo_prob <= last + 1e-15, "cycle {k} echo grew");
            last = ch.echo_prob;
        }
        // and the sequence itself runs with the degradation path enabled
        let bundle = run_sequence(&cfg, 3).unwrap();
        assert!(bundle.pulses > 0);
    }

    #[test]
    fn unknown_figure_rejected() {
        assert!("5".parse::<FigureId>().is_err());
        assert!("2a".parse::<FigureId>().is_ok());
    }

    #[test]
    fn slope_fits_recover_configured_slopes() {
        let fits = slope_fits(&linbo3_levels(16_500.0), 4).unwrap();
        assert_eq!(fits.len(), 3);
        for f in &fits {
            assert!(
                (f.fitted_slope_khz_per_g - f.true_slope_khz_per_g).abs()
                    < 3.0 * f.std_error_khz_per_g + 1e-9,
                "{}: {} vs {} +/- {}",
                f.species,
                f.fitted_slope_khz_per_g,
                f.true_slope_khz_per_g,
                f.std_error_khz_per_g
            );
            assert!(f.std_error_khz_per_g < 0.02);
        }
    }
}
