//! Monte Carlo model of the pulsed SPDC pair source, the memory channel seen
//! by the idler photons, and click detection.
//!
//! Detectors are modelled as non-photon-number-resolving: all photons of one
//! pulse arriving in the same channel produce at most one click. Pulses are
//! processed in independent blocks with per-block derived RNG streams, so a
//! run is reproducible regardless of thread count.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairDistribution {
    Thermal,
    Poisson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceConfig {
    pub rep_rate_mhz: f64,
    /// Mean pair number per pump pulse.
    pub mean_pairs: f64,
    pub pair_distribution: PairDistribution,
    /// Relative pair yield of the satellite (spurious) temporal pump modes.
    pub spurious_mode_fraction: f64,
    pub signal_path_efficiency: f64,
    /// Includes the 20% in/out coupling of the cryogenic waveguide setup.
    pub idler_path_efficiency: f64,
    /// Background click rate, Hz (dark counts plus stray light).
    pub dark_rate_signal_hz: f64,
    pub dark_rate_idler_hz: f64,
    pub jitter_fwhm_ps: f64,
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rep_rate_mhz > 0.0) {
            return Err(CoreError::Config("source: rep_rate must be > 0".into()));
        }
        if self.mean_pairs < 0.0 {
            return Err(CoreError::Config("source: mean_pairs must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.spurious_mode_fraction) {
            return Err(CoreError::Config("source: spurious_mode_fraction must be in [0, 1)".into()));
        }
        for (name, v) in [
            ("signal_path_efficiency", self.signal_path_efficiency),
            ("idler_path_efficiency", self.idler_path_efficiency),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CoreError::Config(format!("source: {name} must be in [0, 1]")));
            }
        }
        if self.dark_rate_signal_hz < 0.0 || self.dark_rate_idler_hz < 0.0 || self.jitter_fwhm_ps < 0.0 {
            return Err(CoreError::Config("source: rates and jitter must be >= 0".into()));
        }
        Ok(())
    }

    pub fn period_ns(&self) -> f64 {
        1000.0 / self.rep_rate_mhz
    }
}

/// The memory as seen by a photon: transmitted at t = 0, echoed at the
/// storage time, or lost.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MemoryChannel {
    pub transmit_prob: f64,
    pub echo_prob: f64,
    pub storage_time_ns: f64,
}

impl MemoryChannel {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.transmit_prob) || self.echo_prob < 0.0 {
            return Err(CoreError::Config("channel probabilities must be in [0, 1]".into()));
        }
        if self.transmit_prob + self.echo_prob > 1.0 + 1e-12 {
            return Err(CoreError::Config("transmit_prob + echo_prob must be <= 1".into()));
        }
        if !(self.storage_time_ns > 0.0) {
            return Err(CoreError::Config("storage_time must be > 0".into()));
        }
        Ok(())
    }

    /// Fully transparent pass-through (source characterization, no memory).
    pub fn bypass() -> Self {
        MemoryChannel { transmit_prob: 1.0, echo_prob: 0.0, storage_time_ns: 48.0 }
    }
}

/// Tagged photon detection stream of one run.
#[derive(Debug, Clone)]
pub struct DetectionRecord {
    pub signal_ns: Vec<f64>,
    pub idler_ns: Vec<f64>,
    pub duration_s: f64,
    pub seed: u64,
}

const BLOCK_PULSES: u64 = 1 << 20;

/// Simulate detection streams for `duration_s` of repetitive pumping.
pub fn simulate_run(
    src: &SourceConfig,
    mem: &MemoryChannel,
    duration_s: f64,
    seed: u64,
) -> Result<DetectionRecord> {
    src.validate()?;
    mem.validate()?;
    if !(duration_s > 0.0) {
        return Err(CoreError::invalid("duration must be > 0"));
    }
    let pulses = (duration_s * src.rep_rate_mhz * 1e6).floor() as u64;
    if pulses < 10_000 {
        return Err(CoreError::invalid(format!(
            "run too short: {pulses} pulses < 1e4 statistical floor"
        )));
    }
    let period = src.period_ns();
    let duration_ns = duration_s * 1e9;
    let jitter_sigma = src.jitter_fwhm_ps * 1e-3 / (8.0 * 2f64.ln()).sqrt();
    // satellite temporal modes between the main pulses
    let satellites: &[f64] = &[1.0 / 3.0, 2.0 / 3.0];
    let spurious_mean = src.mean_pairs * src.spurious_mode_fraction / satellites.len() as f64;

    let n_blocks = pulses.div_ceil(BLOCK_PULSES);
    let mut parts: Vec<(Vec<f64>, Vec<f64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = Rng::split(seed, block);
            let first = block * BLOCK_PULSES;
            let last = (first + BLOCK_PULSES).min(pulses);
            let mut sig = Vec::new();
            let mut idl = Vec::new();
            let emit = |rng: &mut Rng,
                            sig: &mut Vec<f64>,
                            idl: &mut Vec<f64>,
                            t_pulse: f64,
                            n: u64| {
                if n == 0 {
                    return;
                }
                let nf = n as i32;
                let p_sig = 1.0 - (1.0 - src.signal_path_efficiency).powi(nf);
                if rng.next_f64() < p_sig {
                    sig.push(t_pulse + jitter_sigma * rng.normal());
                }
                let p_t = 1.0 - (1.0 - mem.transmit_prob * src.idler_path_efficiency).powi(nf);
                if rng.next_f64() < p_t {
                    idl.push(t_pulse + jitter_sigma * rng.normal());
                }
                let p_e = 1.0 - (1.0 - mem.echo_prob * src.idler_path_efficiency).powi(nf);
                if rng.next_f64() < p_e {
                    idl.push(t_pulse + mem.storage_time_ns + jitter_sigma * rng.normal());
                }
            };
            for p in first..last {
                let t_pulse = p as f64 * period;
                let n = match src.pair_distribution {
                    PairDistribution::Thermal => rng.thermal(src.mean_pairs),
                    PairDistribution::Poisson => rng.poisson(src.mean_pairs),
                };
                emit(&mut rng, &mut sig, &mut idl, t_pulse, n);
                if spurious_mean > 0.0 {
                    for frac in satellites {
                        let n = match src.pair_distribution {
                            PairDistribution::Thermal => rng.thermal(spurious_mean),
                            PairDistribution::Poisson => rng.poisson(spurious_mean),
                        };
                        emit(&mut rng, &mut sig, &mut idl, t_pulse + frac * period, n);
                    }
                }
            }
            (sig, idl)
        })
        .collect();

    let mut signal_ns = Vec::new();
    let mut idler_ns = Vec::new();
    for (s, i) in parts.drain(..) {
        signal_ns.extend(s);
        idler_ns.extend(i);
    }
    // background clicks over the whole run, from a dedicated stream
    let mut rng = Rng::split(seed, u64::MAX);
    for (rate, out) in [
        (src.dark_rate_signal_hz, &mut signal_ns),
        (src.dark_rate_idler_hz, &mut idler_ns),
    ] {
        let n = rng.poisson(rate * duration_s);
        for _ in 0..n {
            out.push(rng.next_f64() * duration_ns);
        }
    }
    signal_ns.retain(|&t| (0.0..duration_ns).contains(&t));
    idler_ns.retain(|&t| (0.0..duration_ns).contains(&t));
    signal_ns.sort_unstable_by(f64::total_cmp);
    idler_ns.sort_unstable_by(f64::total_cmp);
    Ok(DetectionRecord { signal_ns, idler_ns, duration_s, seed })
}

impl DetectionRecord {
    /// CSV columns `channel,time_ns`, events of both channels interleaved in
    /// time order.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "channel,time_ns")?;
        let (mut i, mut j) = (0, 0);
        while i < self.signal_ns.len() || j < self.idler_ns.len() {
            let take_signal = j >= self.idler_ns.len()
                || (i < self.signal_ns.len() && self.signal_ns[i] <= self.idler_ns[j]);
            if take_signal {
                writeln!(f, "signal,{}", self.signal_ns[i])?;
                i += 1;
            } else {
                writeln!(f, "idler,{}", self.idler_ns[j])?;
                j += 1;
            }
        }
        Ok(())
    }

    pub fn read_csv(path: &Path, duration_s: f64, seed: u64) -> Result<Self> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines.next().ok_or_else(|| CoreError::Parse("empty record file".into()))??;
        if header.trim() != "channel,time_ns" {
            return Err(CoreError::Parse(format!("expected header 'channel,time_ns', got '{header}'")));
        }
        let mut signal_ns = Vec::new();
        let mut idler_ns = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (ch, t) = line
                .split_once(',')
                .ok_or_else(|| CoreError::Parse(format!("line {}: expected 2 columns", ln + 2)))?;
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|e| CoreError::Parse(format!("line {}: {e}", ln + 2)))?;
            match ch.trim() {
                "signal" => signal_ns.push(t),
                "idler" => idler_ns.push(t),
                other => return Err(CoreError::Parse(format!("line {}: unknown channel '{other}'", ln + 2))),
            }
        }
        Ok(DetectionRecord { signal_ns, idler_ns, duration_s, seed })
    }
}
