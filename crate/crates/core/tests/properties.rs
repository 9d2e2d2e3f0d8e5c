//! Randomized property checks of the physics kernels.

use proptest::prelude::*;

use afc_core::photon::{build_histogram, DetectionRecord};
use afc_core::spectral::{linbo3_levels, relax, side_hole_detunings, HoleDecayModel};
use afc_core::SpectralGrid;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Relaxation never moves a sample across or away from the baseline.
    #[test]
    fn relax_is_a_contraction(
        od in prop::collection::vec(0.0f64..3.0, 16..64),
        baseline_od in 0.0f64..3.0,
        delay in 1e-4f64..100.0,
    ) {
        let n = od.len();
        let grid = SpectralGrid::new(-10.0, 0.5, od).unwrap();
        let baseline = SpectralGrid::new(-10.0, 0.5, vec![baseline_od; n]).unwrap();
        let model = HoleDecayModel::low_field();
        let out = relax(&grid, &baseline, delay, &model).unwrap();
        for i in 0..n {
            let before = (grid.od()[i] - baseline_od).abs();
            let after = (out.od()[i] - baseline_od).abs();
            prop_assert!(after <= before + 1e-12);
            // sign of the deviation is preserved
            prop_assert!((grid.od()[i] - baseline_od) * (out.od()[i] - baseline_od) >= -1e-12);
        }
    }

    /// Every histogram count corresponds to exactly one (signal, idler) pair
    /// in range.
    #[test]
    fn histogram_conserves_pairs(
        sig in prop::collection::vec(0.0f64..1e4, 0..200),
        idl in prop::collection::vec(0.0f64..1e4, 0..200),
        start in -200.0f64..0.0,
        bin in 0.5f64..5.0,
        bins in 10usize..100,
    ) {
        let mut sig = sig;
        let mut idl = idl;
        sig.sort_unstable_by(f64::total_cmp);
        idl.sort_unstable_by(f64::total_cmp);
        let end = start + bins as f64 * bin;
        let mut brute = 0u64;
        for &ts in &sig {
            for &ti in &idl {
                if (start..end).contains(&(ti - ts)) {
                    brute += 1;
                }
            }
        }
        let rec = DetectionRecord { signal_ns: sig, idler_ns: idl, duration_s: 1.0, seed: 0 };
        let h = build_histogram(&rec, start, bin, bins).unwrap();
        prop_assert_eq!(h.total_pairs, brute);
        prop_assert_eq!(h.counts.iter().sum::<u64>(), brute);
    }

    /// Side-hole detunings scale linearly with the applied field.
    #[test]
    fn side_holes_linear_in_field(field in 1.0f64..40_000.0, scale in 1.01f64..5.0) {
        let a = side_hole_detunings(&linbo3_levels(field));
        let b = side_hole_detunings(&linbo3_levels(field * scale));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y.detuning_mhz - scale * x.detuning_mhz).abs() < 1e-9 * field.max(1.0));
        }
    }
}
