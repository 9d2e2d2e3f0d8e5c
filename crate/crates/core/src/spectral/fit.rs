//! Fitting routines: ordinary least squares for the side-hole field slopes
//! and a Levenberg-Marquardt double-exponential fit for hole decay curves.

use crate::error::{CoreError, Result};
use crate::spectral::relax::HoleDecayModel;

/// OLS slope of detuning (MHz) versus field (G), intercept unconstrained.
/// Returns the slope in kHz/G and its standard error.
pub fn fit_side_hole_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len();
    if n < 2 {
        return Err(CoreError::DegenerateFit("need at least 2 points".into()));
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(CoreError::DegenerateFit("all field values equal".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx; // MHz/G
    let intercept = mean_y - slope * mean_x;
    let stderr = if n > 2 {
        let ssr: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (ssr / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope * 1000.0, stderr * 1000.0)) // kHz/G
}

/// Result of a hole-decay fit: decay model plus overall amplitude and the
/// root-mean-square residual of the fit.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub model: HoleDecayModel,
    pub amplitude: f64,
    pub rms_residual: f64,
}

fn decay_value(p: &[f64; 4], t: f64) -> f64 {
    // p = [ln A, logit w, ln tau_fast, ln tau_slow]
    let a = p[0].exp();
    let w = 1.0 / (1.0 + (-p[1]).exp());
    let tf = p[2].exp();
    let ts = p[3].exp();
    a * (w * (-t / tf).exp() + (1.0 - w) * (-t / ts).exp())
}

fn cost(p: &[f64; 4], samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(t, y)| (decay_value(p, t) - y).powi(2))
        .sum()
}

/// Dense 4x4 solve by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut s = b[col];
        for k in col + 1..4 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

fn levenberg_marquardt(samples: &[(f64, f64)], mut p: [f64; 4]) -> ([f64; 4], f64, bool) {
    let mut lambda = 1e-3;
    let mut c = cost(&p, samples);
    let mut converged = false;
    for _ in 0..400 {
        // numeric Jacobian, central differences in parameter space
        let mut jtj = [[0.0f64; 4]; 4];
        let mut jtr = [0.0f64; 4];
        let h = 1e-6;
        for &(t, y) in samples {
            let r = decay_value(&p, t) - y;
            let mut grad = [0.0; 4];
            for k in 0..4 {
                let mut pp = p;
                pp[k] += h;
                let mut pm = p;
                pm[k] -= h;
                grad[k] = (decay_value(&pp, t) - decay_value(&pm, t)) / (2.0 * h);
            }
            for i in 0..4 {
                jtr[i] += grad[i] * r;
                for j in 0..4 {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut aug = jtj;
            for i in 0..4 {
                aug[i][i] += lambda * (jtj[i][i].max(1e-12));
            }
            let rhs = [-jtr[0], -jtr[1], -jtr[2], -jtr[3]];
            if let Some(step) = solve4(aug, rhs) {
                let mut cand = p;
                for k in 0..4 {
                    cand[k] += step[k].clamp(-5.0, 5.0);
                }
                let cc = cost(&cand, samples);
                if cc.is_finite() && cc < c {
                    let rel = (c - cc) / c.max(1e-300);
                    p = cand;
                    c = cc;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    if rel < 1e-12 {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }
    (p, c, converged)
}

/// Nonlinear least-squares fit of `depth(t) = A (w e^(-t/tf) + (1-w) e^(-t/ts))`.
pub fn fit_hole_decay(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 6 {
        return Err(CoreError::DegenerateFit(
            "need at least 6 samples spanning both decay regimes".into(),
        ));
    }
    let mut samples = samples.to_vec();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ymax = samples.iter().map(|s| s.1).fold(f64::MIN, f64::max);
    let ymin = samples.iter().map(|s| s.1).fold(f64::MAX, f64::min);
    if ymax <= 0.0 || (ymax - ymin) < 1e-3 * ymax.abs() {
        return Err(CoreError::FitFailure {
            residual: 0.0,
            detail: "samples show no decay (constant or non-positive depths)".into(),
        });
    }

    // Initial slow lifetime from a log-linear fit of the tail.
    let tail = &samples[samples.len() * 2 / 3..];
    let ts0 = {
        let pts: Vec<(f64, f64)> = tail
            .iter()
            .filter(|s| s.1 > 0.0)
            .map(|&(t, y)| (t, y.ln()))
            .collect();
        if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let k = sxy / sxx;
            if k < -1e-12 {
                -1.0 / k
            } else {
                samples.last().unwrap().0
            }
        } else {
            samples.last().unwrap().0
        }
    };

    let span = samples.last().unwrap().0 - samples[0].0;
    let mut best: Option<([f64; 4], f64)> = None;
    for (w0, tf_frac) in [(0.5, 0.05), (0.3, 0.02), (0.7, 0.1), (0.5, 0.005)] {
        let tf0 = (ts0 * tf_frac).max(span * 1e-4);
        let p0 = [
            ymax.ln(),
            (w0 / (1.0 - w0) as f64).ln(),
            tf0.ln(),
            ts0.max(tf0 * 3.0).ln(),
        ];
        let (p, c, _) = levenberg_marquardt(&samples, p0);
        if best.as_ref().map_or(true, |(_, bc)| c < *bc) {
            best = Some((p, c));
        }
    }
    let (mut p, c) = best.unwrap();

    // Keep the fast/slow ordering canonical.
    if p[2] > p[3] {
        p.swap(2, 3);
        p[1] = -p[1];
    }
    let rms = (c / samples.len() as f64).sqrt();
    if rms > 0.2 * ymax {
        return Err(CoreError::FitFailure {
            residual: rms,
            detail: "double-exponential fit did not converge to the data".into(),
        });
    }
    let w = 1.0 / (1.0 + (-p[1]).exp());
    let mut tf = p[2].exp();
    let mut ts = p[3].exp();
    if tf >= ts {
        ts = tf * (1.0 + 1e-9); // degenerate single-exponential case
        tf = tf * (1.0 - 1e-9);
    }
    Ok(DecayFit {
        model: HoleDecayModel {
            fast_lifetime_s: tf,
            slow_lifetime_s: ts,
            weight_fast: w,
            persistent_lifetime_s: None,
        },
        amplitude: p[0].exp(),
        rms_residual: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn noiseless_slope_recovered() {
        let pts: Vec<(f64, f64)> = (0..8)
            .map(|i| {
                let b = 10_000.0 + 1_250.0 * i as f64;
                (b, 1.721e-3 * b)
            })
            .collect();
        let (slope, err) = fit_side_hole_slope(&pts).unwrap();
        assert!((slope - 1.721).abs() < 1e-9);
        assert!(err < 1e-9);
    }

    #[test]
    fn two_point_line() {
        let (slope, err) = fit_side_hole_slope(&[(10_000.0, 11.5), (20_000.0, 23.0)]).unwrap();
        assert!((slope - 1.15).abs() < 1e-12);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn degenerate_slope_inputs() {
        assert!(fit_side_hole_slope(&[(1.0, 2.0)]).is_err());
        assert!(fit_side_hole_slope(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]).is_err());
    }

    #[test]
    fn single_exponential_recovered() {
        let samples: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let t = 0.02 * 1.2f64.powi(i);
                (t, (-t / 0.060).exp())
            })
            .collect();
        let fit = fit_hole_decay(&samples).unwrap();
        // w ~ 1: the whole weight sits on one lifetime
        let eff = fit.model.weight_fast * fit.model.fast_lifetime_s
            + (1.0 - fit.model.weight_fast) * fit.model.slow_lifetime_s;
        let tau = if fit.model.weight_fast > 0.5 {
            fit.model.fast_lifetime_s
        } else {
            fit.model.slow_lifetime_s
        };
        assert!(
            (tau - 0.060).abs() / 0.060 < 0.05 || (eff - 0.060).abs() / 0.060 < 0.05,
            "tau {tau}, eff {eff}"
        );
    }

    #[test]
    fn double_exponential_with_noise() {
        let mut rng = Rng::new(11);
        let samples: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let t = 0.02 * (4.5f64 / 0.02).powf(i as f64 / 39.0);
                let y = 0.5 * (-t / 0.060f64).exp() + 0.5 * (-t / 2.44f64).exp();
                (t, y * (1.0 + 0.02 * rng.normal()))
            })
            .collect();
        let fit = fit_hole_decay(&samples).unwrap();
        assert!((fit.model.fast_lifetime_s - 0.060).abs() / 0.060 < 0.10, "{:?}", fit.model);
        assert!((fit.model.slow_lifetime_s - 2.44).abs() / 2.44 < 0.10, "{:?}", fit.model);
    }

    #[test]
    fn constant_samples_rejected() {
        let samples: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.1, 1.0)).collect();
        assert!(fit_hole_decay(&samples).is_err());
    }

    #[test]
    fn noiseless_calibration_0p1_percent() {
        let samples: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let t = 0.02 * (4.5f64 / 0.02).powf(i as f64 / 49.0);
                (t, 0.8 * (0.4 * (-t / 0.060f64).exp() + 0.6 * (-t / 1.36f64).exp()))
            })
            .collect();
        let fit = fit_hole_decay(&samples).unwrap();
        assert!((fit.model.fast_lifetime_s - 0.060).abs() / 0.060 < 1e-3);
        assert!((fit.model.slow_lifetime_s - 1.36).abs() / 1.36 < 1e-3);
        assert!((fit.model.weight_fast - 0.4).abs() < 1e-3);
        assert!((fit.amplitude - 0.8).abs() < 1e-3);
    }
}
