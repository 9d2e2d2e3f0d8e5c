//! Cross-correlation g2 estimate from a coincidence histogram.
//!
//! g2 = coincidences in the zero-delay peak window over the mean accidental
//! count in the same window at neighboring pump periods. Counting errors are
//! Poisson and propagated to a standard error on the ratio.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::photon::histogram::CoincidenceHistogram;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct G2Estimate {
    pub value: f64,
    pub std_error: f64,
    pub peak_counts: u64,
    pub accidental_mean: f64,
    pub accidental_windows: usize,
}

impl G2Estimate {
    /// True when the estimate excludes the classical bound g2 <= 2 at two
    /// standard errors.
    pub fn nonclassical(&self) -> bool {
        self.value - 2.0 * self.std_error > 2.0
    }
}

/// Estimate g2 at `peak_center_ns` against accidental windows displaced by
/// the pump periods in `accidental_offsets` (units of `rep_period_ns`).
pub fn g2_from_histogram(
    hist: &CoincidenceHistogram,
    peak_center_ns: f64,
    half_window_ns: f64,
    rep_period_ns: f64,
    accidental_offsets: &[i32],
) -> Result<G2Estimate> {
    if accidental_offsets.is_empty() {
        return Err(CoreError::invalid("need at least one accidental window"));
    }
    if !(half_window_ns > 0.0) || !(rep_period_ns > 0.0) {
        return Err(CoreError::invalid("window and period must be > 0"));
    }
    if 2.0 * half_window_ns > rep_period_ns {
        return Err(CoreError::invalid("window wider than a pump period"));
    }
    let span = hist.start_ns..hist.start_ns + hist.counts.len() as f64 * hist.bin_ns;
    let peak = hist.window_counts(peak_center_ns, half_window_ns);
    let mut acc_total = 0u64;
    for &k in accidental_offsets {
        if k == 0 {
            return Err(CoreError::invalid("accidental offset 0 is the peak itself"));
        }
        let c = peak_center_ns + k as f64 * rep_period_ns;
        if !span.contains(&(c - half_window_ns)) || !span.contains(&(c + half_window_ns)) {
            return Err(CoreError::invalid(format!(
                "accidental window at offset {k} falls outside the histogram"
            )));
        }
        acc_total += hist.window_counts(c, half_window_ns);
    }
    if acc_total == 0 {
        return Err(CoreError::LowCounts(
            "no accidental coincidences; g2 denominator undefined".into(),
        ));
    }
    let m = accidental_offsets.len() as f64;
    let acc_mean = acc_total as f64 / m;
    let value = peak as f64 / acc_mean;
    // relative Poisson errors in quadrature; peak may be 0
    let rel2 = if peak > 0 { 1.0 / peak as f64 } else { 0.0 } + 1.0 / acc_total as f64;
    let std_error = value * rel2.sqrt();
    Ok(G2Estimate {
        value,
        std_error,
        peak_counts: peak,
        accidental_mean: acc_mean,
        accidental_windows: accidental_offsets.len(),
    })
}

/// Symmetric accidental offsets {-n..-1, 1..n}.
pub fn symmetric_offsets(n: usize) -> Vec<i32> {
    let mut v: Vec<i32> = (1..=n as i32).flat_map(|k| [-k, k]).collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(counts: Vec<u64>) -> CoincidenceHistogram {
        let total = counts.iter().sum();
        CoincidenceHistogram { start_ns: -50.0, bin_ns: 1.0, counts, total_pairs: total }
    }

    #[test]
    fn ratio_and_error_from_known_counts() {
        // peak 400 at delay 0, 100 in each of 4 accidental windows (period 10)
        let mut counts = vec![0u64; 100];
        for (delay, c) in [(-20.0, 100), (-10.0, 100), (0.0, 400), (10.0, 100), (20.0, 100)] {
            let i = ((delay - -50.0) / 1.0) as usize;
            counts[i] = c;
        }
        let h = hist(counts);
        let est = g2_from_histogram(&h, 0.0, 1.5, 10.0, &symmetric_offsets(2)).unwrap();
        assert!((est.value - 4.0).abs() < 1e-12);
        let rel = (1.0 / 400.0 + 1.0 / 400.0f64).sqrt();
        assert!((est.std_error - 4.0 * rel).abs() < 1e-12);
        // 4 - 2 * 0.28 is still above the classical bound
        assert!(est.nonclassical());
    }

    #[test]
    fn marginal_ratio_is_not_nonclassical() {
        let mut counts = vec![0u64; 100];
        counts[50] = 12;
        counts[40] = 5;
        counts[60] = 5;
        let est = g2_from_histogram(&hist(counts), 0.0, 1.5, 10.0, &[-1, 1]).unwrap();
        assert!(est.value > 2.0);
        assert!(!est.nonclassical(), "2.4 within errors of the classical bound");
    }

    #[test]
    fn strongly_correlated_is_nonclassical() {
        let mut counts = vec![0u64; 100];
        counts[50] = 2000;
        counts[40] = 100;
        counts[60] = 100;
        let est = g2_from_histogram(&hist(counts), 0.0, 1.5, 10.0, &[-1, 1]).unwrap();
        assert!(est.value > 15.0);
        assert!(est.nonclassical());
    }

    #[test]
    fn zero_accidentals_is_low_counts() {
        let mut counts = vec![0u64; 100];
        counts[50] = 10;
        let err = g2_from_histogram(&hist(counts), 0.0, 1.5, 10.0, &[-1, 1]).unwrap_err();
        assert!(matches!(err, CoreError::LowCounts(_)));
    }

    #[test]
    fn out_of_range_accidental_window_rejected() {
        let h = hist(vec![1; 100]);
        assert!(g2_from_histogram(&h, 0.0, 1.5, 30.0, &[-2, 2]).is_err());
    }

    #[test]
    fn offsets_are_symmetric_and_nonzero() {
        let v = symmetric_offsets(3);
        assert_eq!(v, vec![-3, -2, -1, 1, 2, 3]);
    }
}
