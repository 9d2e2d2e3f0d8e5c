//! Coincidence histogram between two sorted detection-time streams.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::photon::source::DetectionRecord;

#[derive(Debug, Clone, Serialize)]
pub struct CoincidenceHistogram {
    /// Delay of the left edge of bin 0, ns. Delays are idler minus signal.
    pub start_ns: f64,
    pub bin_ns: f64,
    pub counts: Vec<u64>,
    pub total_pairs: u64,
}

impl CoincidenceHistogram {
    pub fn bin_center_ns(&self, i: usize) -> f64 {
        self.start_ns + (i as f64 + 0.5) * self.bin_ns
    }

    /// Index of the bin containing `delay_ns`, if inside range.
    pub fn bin_of(&self, delay_ns: f64) -> Option<usize> {
        let i = ((delay_ns - self.start_ns) / self.bin_ns).floor();
        if i >= 0.0 && (i as usize) < self.counts.len() {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Sum of counts in bins whose centers lie within `half_window_ns` of
    /// `center_ns`.
    pub fn window_counts(&self, center_ns: f64, half_window_ns: f64) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(i, _)| (self.bin_center_ns(*i) - center_ns).abs() <= half_window_ns)
            .map(|(_, &c)| c)
            .sum()
    }
}

/// Histogram all (signal, idler) pairs with delay in [start, start + n*bin).
/// Streams must be time sorted; a two-pointer sweep keeps this linear.
pub fn build_histogram(
    record: &DetectionRecord,
    start_ns: f64,
    bin_ns: f64,
    bins: usize,
) -> Result<CoincidenceHistogram> {
    if !(bin_ns > 0.0) || bins == 0 {
        return Err(CoreError::invalid("histogram needs bin_ns > 0 and bins > 0"));
    }
    for ch in [&record.signal_ns, &record.idler_ns] {
        if ch.windows(2).any(|w| w[0] > w[1]) {
            return Err(CoreError::invalid("detection streams must be sorted"));
        }
    }
    let end_ns = start_ns + bins as f64 * bin_ns;
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    let mut lo = 0usize;
    for &ts in &record.signal_ns {
        // idler window [ts + start, ts + end); lo only moves forward
        while lo < record.idler_ns.len() && record.idler_ns[lo] < ts + start_ns {
            lo += 1;
        }
        for &ti in &record.idler_ns[lo..] {
            let d = ti - ts;
            if d >= end_ns {
                break;
            }
            let bin = ((d - start_ns) / bin_ns) as usize;
            counts[bin.min(bins - 1)] += 1;
            total += 1;
        }
    }
    Ok(CoincidenceHistogram { start_ns, bin_ns, counts, total_pairs: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(signal: Vec<f64>, idler: Vec<f64>) -> DetectionRecord {
        DetectionRecord { signal_ns: signal, idler_ns: idler, duration_s: 1e-3, seed: 0 }
    }

    #[test]
    fn pairs_land_in_expected_bins() {
        let rec = record(vec![100.0, 200.0], vec![100.5, 203.0]);
        let h = build_histogram(&rec, -5.0, 1.0, 10).unwrap();
        assert_eq!(h.counts[h.bin_of(0.5).unwrap()], 1);
        assert_eq!(h.counts[h.bin_of(3.0).unwrap()], 1);
        // cross pairs at +103 and -99.5 ns fall outside the range
        assert_eq!(h.total_pairs, 2);
    }

    #[test]
    fn total_matches_brute_force() {
        let mut rng = crate::rng::Rng::new(7);
        let mut sig: Vec<f64> = (0..500).map(|_| rng.next_f64() * 1e4).collect();
        let mut idl: Vec<f64> = (0..500).map(|_| rng.next_f64() * 1e4).collect();
        sig.sort_unstable_by(f64::total_cmp);
        idl.sort_unstable_by(f64::total_cmp);
        let (start, bin, bins) = (-100.0, 2.5, 80);
        let h = build_histogram(&record(sig.clone(), idl.clone()), start, bin, bins).unwrap();
        let end = start + bins as f64 * bin;
        let mut brute = 0u64;
        for &ts in &sig {
            for &ti in &idl {
                if (start..end).contains(&(ti - ts)) {
                    brute += 1;
                }
            }
        }
        assert_eq!(h.total_pairs, brute);
        assert_eq!(h.counts.iter().sum::<u64>(), brute);
    }

    #[test]
    fn unsorted_stream_rejected() {
        let rec = record(vec![5.0, 1.0], vec![]);
        assert!(build_histogram(&rec, 0.0, 1.0, 4).is_err());
    }

    #[test]
    fn window_counts_sums_centered_bins() {
        let h = CoincidenceHistogram {
            start_ns: 0.0,
            bin_ns: 1.0,
            counts: vec![1, 2, 3, 4, 5],
            total_pairs: 15,
        };
        // centers 0.5..4.5; window 2.5 +/- 1.0 covers centers 1.5, 2.5, 3.5
        assert_eq!(h.window_counts(2.5, 1.0), 2 + 3 + 4);
    }
}
