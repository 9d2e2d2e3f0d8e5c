//! Time-domain photon wave packets and their propagation through a transfer
//! function, plus echo extraction.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::afc::transfer::{fft_in_place, TransferFunction};
use crate::error::{CoreError, Result};

/// Complex field envelope sampled at `sample_rate_ghz`, with the optical
/// carrier detuned by `carrier_detuning_mhz` from the comb center.
#[derive(Debug, Clone)]
pub struct Pulse {
    pub samples: Vec<Complex64>,
    pub sample_rate_ghz: f64,
    pub carrier_detuning_mhz: f64,
}

impl Pulse {
    /// Gaussian wave packet (intensity FWHM `fwhm_ns`) centered at
    /// `center_ns` in a record of `span_ns`.
    pub fn gaussian(
        fwhm_ns: f64,
        center_ns: f64,
        span_ns: f64,
        sample_rate_ghz: f64,
        carrier_detuning_mhz: f64,
    ) -> Result<Pulse> {
        if !(fwhm_ns > 0.0) || !(span_ns > 0.0) || !(sample_rate_ghz > 0.0) {
            return Err(CoreError::invalid("pulse parameters must be > 0"));
        }
        let n = ((span_ns * sample_rate_ghz).ceil() as usize).next_power_of_two();
        let dt = 1.0 / sample_rate_ghz;
        // field sigma: intensity FWHM = sqrt(2 ln 2) * 2 sigma_field / sqrt(2)
        let sigma_field = fwhm_ns / (2.0 * (2.0f64.ln()).sqrt());
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 * dt - center_ns;
                Complex64::new((-(t * t) / (2.0 * sigma_field * sigma_field)).exp(), 0.0)
            })
            .collect();
        let mut p = Pulse { samples, sample_rate_ghz, carrier_detuning_mhz };
        let e = p.energy();
        let scale = 1.0 / e.sqrt();
        for s in &mut p.samples {
            *s *= scale;
        }
        Ok(p)
    }

    pub fn dt_ns(&self) -> f64 {
        1.0 / self.sample_rate_ghz
    }

    pub fn duration_ns(&self) -> f64 {
        self.samples.len() as f64 * self.dt_ns()
    }

    /// Sum of |samples|^2 (discrete energy; time step dropped for ratios).
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Energy-weighted mean arrival time.
    pub fn centroid_ns(&self) -> f64 {
        let dt = self.dt_ns();
        let mut w = 0.0;
        let mut s = 0.0;
        for (i, v) in self.samples.iter().enumerate() {
            let e = v.norm_sqr();
            w += e;
            s += e * i as f64 * dt;
        }
        s / w
    }

    /// RMS spectral width (MHz) about the carrier, from the discrete spectrum.
    fn spectral_sd_mhz(&self) -> f64 {
        let mut spec = self.samples.clone();
        fft_in_place(&mut spec, false);
        let n = spec.len();
        let df = self.sample_rate_ghz * 1000.0 / n as f64;
        let mut w = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (k, v) in spec.iter().enumerate() {
            let f = if k < n / 2 { k as f64 } else { k as f64 - n as f64 } * df;
            let e = v.norm_sqr();
            w += e;
            m1 += e * f;
            m2 += e * f * f;
        }
        let mean = m1 / w;
        (m2 / w - mean * mean).max(0.0).sqrt()
    }

    /// CSV columns `time_ns,re,im`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "time_ns,re,im")?;
        let dt = self.dt_ns();
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(f, "{},{},{}", i as f64 * dt, s.re, s.im)?;
        }
        Ok(())
    }

    pub fn read_csv(path: &Path, carrier_detuning_mhz: f64) -> Result<Pulse> {
        let f = BufReader::new(std::fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines.next().ok_or_else(|| CoreError::Parse("empty pulse file".into()))??;
        if header.trim() != "time_ns,re,im" {
            return Err(CoreError::Parse(format!("expected header 'time_ns,re,im', got '{header}'")));
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(CoreError::Parse(format!("line {}: expected 3 columns", ln + 2)));
            }
            let p = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|e| CoreError::Parse(format!("line {}: {e}", ln + 2)))
            };
            times.push(p(cols[0])?);
            samples.push(Complex64::new(p(cols[1])?, p(cols[2])?));
        }
        if times.len() < 2 {
            return Err(CoreError::Parse("pulse file needs at least 2 rows".into()));
        }
        let dt = times[1] - times[0];
        if dt <= 0.0 {
            return Err(CoreError::Parse("time axis must be increasing".into()));
        }
        Ok(Pulse { samples, sample_rate_ghz: 1.0 / dt, carrier_detuning_mhz })
    }
}

/// Filter the pulse through the transfer function in the frequency domain.
pub fn propagate(pulse: &Pulse, tf: &TransferFunction) -> Result<Pulse> {
    let sd = pulse.spectral_sd_mhz();
    let lo = pulse.carrier_detuning_mhz - 2.0 * sd;
    let hi = pulse.carrier_detuning_mhz + 2.0 * sd;
    if lo < tf.start_mhz() || hi > tf.end_mhz() {
        return Err(CoreError::invalid(format!(
            "pulse band [{lo:.1}, {hi:.1}] MHz not inside transfer-function support [{:.1}, {:.1}]",
            tf.start_mhz(),
            tf.end_mhz()
        )));
    }
    let n = pulse.samples.len();
    let df = pulse.sample_rate_ghz * 1000.0 / n as f64;
    let mut spec = pulse.samples.clone();
    fft_in_place(&mut spec, false);
    for (k, v) in spec.iter_mut().enumerate() {
        let f = if k < n / 2 { k as f64 } else { k as f64 - n as f64 } * df;
        *v *= tf.eval(f + pulse.carrier_detuning_mhz);
    }
    fft_in_place(&mut spec, true);
    Ok(Pulse {
        samples: spec,
        sample_rate_ghz: pulse.sample_rate_ghz,
        carrier_detuning_mhz: pulse.carrier_detuning_mhz,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EchoPeak {
    pub order: u32,
    /// Expected rephasing time m/delta relative to the transmitted pulse, ns.
    pub time_ns: f64,
    /// Energy-weighted arrival time actually measured in the window, ns.
    pub measured_time_ns: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EchoResult {
    pub transmitted_fraction: f64,
    pub echoes: Vec<EchoPeak>,
    pub absorbed_lost: f64,
}

/// Integrate |field|^2 in windows at t0 and t0 + m/delta (m <= 3), normalized
/// to the input energy.
pub fn echo_analysis(
    input: &Pulse,
    output: &Pulse,
    delta_mhz: f64,
    window_ns: f64,
) -> Result<EchoResult> {
    if !(delta_mhz > 0.0) {
        return Err(CoreError::invalid("delta must be > 0"));
    }
    let tau = 1000.0 / delta_mhz;
    if !(window_ns > 0.0) || window_ns > tau / 2.0 {
        return Err(CoreError::invalid(format!(
            "window {window_ns} ns would overlap neighbouring echoes (tau = {tau:.1} ns)"
        )));
    }
    let t0 = input.centroid_ns();
    if output.duration_ns() < t0 + 2.0 * tau {
        return Err(CoreError::invalid(
            "output record must span at least two rephasing periods past the pulse",
        ));
    }
    let e_in = input.energy();
    let dt = output.dt_ns();
    let window_energy = |center: f64| -> (f64, f64) {
        let lo = ((center - window_ns) / dt).floor().max(0.0) as usize;
        let hi = (((center + window_ns) / dt).ceil() as usize).min(output.samples.len());
        let mut e = 0.0;
        let mut ts = 0.0;
        for i in lo..hi {
            let p = output.samples[i].norm_sqr();
            e += p;
            ts += p * i as f64 * dt;
        }
        (e / e_in, if e > 0.0 { ts / e } else { center })
    };
    let (transmitted, _) = window_energy(t0);
    let mut echoes = Vec::new();
    let mut total = transmitted;
    for m in 1..=3u32 {
        let center = t0 + m as f64 * tau;
        if center + window_ns > output.duration_ns() {
            break;
        }
        let (eff, measured) = window_energy(center);
        total += eff;
        echoes.push(EchoPeak {
            order: m,
            time_ns: m as f64 * tau,
            measured_time_ns: measured - t0,
            efficiency: eff,
        });
    }
    Ok(EchoResult {
        transmitted_fraction: transmitted,
        echoes,
        absorbed_lost: 1.0 - total,
    })
}
