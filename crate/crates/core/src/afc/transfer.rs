//! Causal linear response of the absorption profile.
//!
//! Amplitude is `exp(-od/2)`; the phase is the minimum-phase partner of the
//! log-magnitude (Kramers-Kronig), computed with the complex-cepstrum method
//! on an 8x zero-padded axis so the impulse response is causal.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::Result;
use crate::grid::SpectralGrid;

pub(crate) fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
    if inverse {
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransferFunction {
    start_mhz: f64,
    step_mhz: f64,
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
}

/// Minimum-phase spectrum from log-magnitude samples on a periodic axis.
/// Returns the phase corresponding to a causal impulse response under the
/// convention `h[n] = IFFT(H)[n]`.
fn minimum_phase(log_mag: &[f64]) -> Vec<f64> {
    let n = log_mag.len();
    let mut cep: Vec<Complex64> = log_mag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut cep, true);
    // causal part of the cepstrum
    for (i, c) in cep.iter_mut().enumerate() {
        if i == 0 || (n % 2 == 0 && i == n / 2) {
            // keep
        } else if i < n.div_ceil(2) {
            *c *= 2.0;
        } else {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    fft_in_place(&mut cep, false);
    cep.iter().map(|c| c.im).collect()
}

/// Build the causal transfer function of a grid. The grid is extended by 8x
/// with a smooth wrap of the edge optical depths before the phase is
/// computed, suppressing periodic-boundary artifacts.
pub fn transfer_function(grid: &SpectralGrid) -> Result<TransferFunction> {
    let n = grid.len();
    let total = (8 * n).next_power_of_two();
    let pad = total - n;
    let od0 = grid.od()[0];
    let od1 = grid.od()[n - 1];
    let mut half_od = Vec::with_capacity(total);
    half_od.extend(grid.od().iter().map(|&d| d / 2.0));
    for i in 0..pad {
        // cosine ramp from the right edge value back to the left edge value
        let u = (i as f64 + 0.5) / pad as f64;
        let w = 0.5 * (1.0 - (std::f64::consts::PI * u).cos());
        half_od.push((od1 * (1.0 - w) + od0 * w) / 2.0);
    }
    let log_mag: Vec<f64> = half_od.iter().map(|&a| -a).collect();
    let phase_full = minimum_phase(&log_mag);
    Ok(TransferFunction {
        start_mhz: grid.start_mhz(),
        step_mhz: grid.step_mhz(),
        amplitude: half_od[..n].iter().map(|&a| (-a).exp()).collect(),
        phase: phase_full[..n].to_vec(),
    })
}

impl TransferFunction {
    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    pub fn start_mhz(&self) -> f64 {
        self.start_mhz
    }

    pub fn end_mhz(&self) -> f64 {
        self.start_mhz + self.step_mhz * (self.len() - 1) as f64
    }

    /// Complex response at a detuning (MHz); clamps to edge values outside
    /// the stored axis.
    pub fn eval(&self, f_mhz: f64) -> Complex64 {
        let x = (f_mhz - self.start_mhz) / self.step_mhz;
        let last = self.len() - 1;
        let (a, p) = if x <= 0.0 {
            (self.amplitude[0], self.phase[0])
        } else if x >= last as f64 {
            (self.amplitude[last], self.phase[last])
        } else {
            let i = x.floor() as usize;
            let frac = x - i as f64;
            (
                self.amplitude[i] * (1.0 - frac) + self.amplitude[i + 1] * frac,
                self.phase[i] * (1.0 - frac) + self.phase[i + 1] * frac,
            )
        };
        Complex64::from_polar(a, p)
    }

    /// Impulse response magnitude on the internal padded axis, plus the time
    /// bin width in ns. Used by the causality checks.
    pub fn impulse_response(grid: &SpectralGrid) -> Result<(Vec<f64>, f64)> {
        let n = grid.len();
        let total = (8 * n).next_power_of_two();
        let pad = total - n;
        let od0 = grid.od()[0];
        let od1 = grid.od()[n - 1];
        let mut half_od: Vec<f64> = grid.od().iter().map(|&d| d / 2.0).collect();
        for i in 0..pad {
            let u = (i as f64 + 0.5) / pad as f64;
            let w = 0.5 * (1.0 - (std::f64::consts::PI * u).cos());
            half_od.push((od1 * (1.0 - w) + od0 * w) / 2.0);
        }
        let log_mag: Vec<f64> = half_od.iter().map(|&a| -a).collect();
        let phase = minimum_phase(&log_mag);
        let mut full: Vec<Complex64> = (0..total)
            .map(|i| Complex64::from_polar(log_mag[i].exp(), phase[i]))
            .collect();
        fft_in_place(&mut full, true);
        let mags: Vec<f64> = full.iter().map(|c| c.norm()).collect();
        let dt_ns = 1000.0 / (total as f64 * grid.step_mhz());
        Ok((mags, dt_ns))
    }
}

/// Max |h| over the anticausal half relative to the peak; the causality
/// figure of merit used by the self-test.
pub fn anticausal_fraction(grid: &SpectralGrid) -> Result<f64> {
    let (mags, _) = TransferFunction::impulse_response(grid)?;
    let total = mags.len();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    // indices total/2.. correspond to negative times; leave one bin of slack
    let worst = mags[total / 2..total - 1].iter().cloned().fold(0.0, f64::max);
    Ok(worst / peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_identity() {
        let g = SpectralGrid::flat(100.0, 0.5, 0.0).unwrap();
        let tf = transfer_function(&g).unwrap();
        for i in 0..tf.len() {
            assert!((tf.amplitude[i] - 1.0).abs() < 1e-12);
            assert!(tf.phase[i].abs() < 1e-9);
        }
    }

    #[test]
    fn flat_absorber_uniform_on_band() {
        let g = SpectralGrid::flat(100.0, 0.5, 1.4).unwrap();
        let tf = transfer_function(&g).unwrap();
        let mid = tf.len() / 2;
        assert!((tf.amplitude[mid] - (-0.7f64).exp()).abs() < 1e-12);
        // phase is flat in the interior of the band
        let span = tf.phase[mid - 20..mid + 20]
            .iter()
            .cloned()
            .fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p), hi.max(p)));
        assert!(span.1 - span.0 < 1e-3, "phase span {:?}", span);
    }

    #[test]
    fn lorentzian_line_is_causal() {
        let mut od = Vec::new();
        let n = 2001;
        for i in 0..n {
            let f = (i as f64 - 1000.0) * 0.1;
            od.push(1.5 / (1.0 + (f / 5.0f64).powi(2)));
        }
        let g = SpectralGrid::new(-100.0, 0.1, od).unwrap();
        let frac = anticausal_fraction(&g).unwrap();
        assert!(frac < 1e-6, "anticausal fraction {frac}");
    }

    #[test]
    fn comb_is_causal_with_echoes_only_at_positive_times() {
        let spec = crate::afc::comb::CombSpec {
            bandwidth_ghz: 0.5,
            delta_mhz: 20.0,
            finesse: 2.0,
            peak_od: 2.0,
            background_od: 0.3,
            tooth_shape: crate::afc::comb::ToothShape::Square,
        };
        let g = crate::afc::comb::build_comb(&spec).unwrap();
        // the decaying echo train wraps around the finite FFT window, so the
        // bound is looser than for a single line
        let frac = anticausal_fraction(&g).unwrap();
        assert!(frac < 1e-3, "anticausal fraction {frac}");
        let (mags, dt) = TransferFunction::impulse_response(&g).unwrap();
        // first echo peak at 1/delta = 50 ns
        let m0 = (50.0 / dt).round() as usize;
        let window = (2.0 / dt).ceil() as usize;
        let echo = mags[m0 - window..m0 + window].iter().cloned().fold(0.0, f64::max);
        let floor = mags[m0 + 5 * window..m0 + 15 * window]
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        assert!(echo > 10.0 * floor, "echo {echo} vs floor {floor}");
    }
}
