use std::f64::consts::LN_2;

use hausdorff_lab::witness::{
    build_fn, classify, expected_trend, gn_band_norms, gn_wiener_norm, lower_bound_experiment_modulation,
    normalised_lp, psi, rho_j, shell_sum, TrendVerdict, WitnessSettings, WitnessSpec, BOUNDED_SPREAD,
    MODULATION_GROWTH,
};
use hausdorff_lab::corpus::{annulus_kernel, divergent_kernel};
use hausdorff_lab::kernel::ConditionVerdict;
use proptest::prelude::*;

proptest! {
    #[test]
    fn telescoped_sum_matches_direct_sum(t in -5000.0..5000.0f64, a in 0i32..4, len in 0i32..10) {
        let b = a + len;
        let direct: f64 = (a..=b).map(|j| rho_j(j, t)).sum();
        prop_assert!((shell_sum(t, a, b) - direct).abs() < 1e-12);
    }

    #[test]
    fn shells_form_a_plateau(t in 2.0..3000.0f64) {
        // For 2^{a-1} 3/2 <= |t| <= 2^b 4/3 all shells overlap to exactly 1.
        let (a, b) = (1, 12);
        if t >= 1.5 && t <= 4.0 / 3.0 * 2f64.powi(b) {
            prop_assert_eq!(shell_sum(t, a, b), 1.0);
        }
    }
}

#[test]
fn psi_is_a_plateau_with_smooth_edge() {
    assert_eq!(psi(0.0), 1.0);
    assert_eq!(psi(4.0 / 3.0), 1.0);
    assert_eq!(psi(1.5), 0.0);
    assert!(psi(1.4) > 0.0 && psi(1.4) < 1.0);
}

#[test]
fn spec_limits() {
    assert!(WitnessSpec::new(8, 2, 2.0, 2.0).is_ok());
    assert!(WitnessSpec::new(8, 4, 2.0, 2.0).is_err());
    assert!(WitnessSpec::new(3, 1, 2.0, 2.0).is_err());
    assert!(WitnessSpec::new(8, 0, 2.0, 2.0).is_err());
    let s = WitnessSpec::scheduled(8, 2.0, 2.0).unwrap();
    assert_eq!(s.margin, 2);
    assert_eq!(s.grid().points(), 1 << 15);
    assert_eq!(s.grid().half_extent(), 3.0 * 512.0);
}

#[test]
fn small_witnesses_are_confined_and_positive() {
    let mut normalised = Vec::new();
    for n in [6, 7, 8] {
        let w = build_fn(&WitnessSpec::scheduled(n, 2.0, 2.0).unwrap()).unwrap();
        assert!(w.spectral_tail <= 1e-10, "N = {n}: {}", w.spectral_tail);
        assert!(w.mollifier_tail <= 1e-12);
        assert!(w.c0 > 0.0);
        assert!(w.min_relative >= -1e-12);
        normalised.push(normalised_lp(&w));
    }
    let mean = normalised.iter().sum::<f64>() / 3.0;
    assert!(normalised.iter().all(|v| (v / mean - 1.0).abs() <= 0.15), "{normalised:?}");
}

#[test]
fn wiener_norm_grows_like_log() {
    let a = gn_wiener_norm(&WitnessSpec::scheduled(6, 2.0, 2.0).unwrap()) / (6.0 * LN_2).sqrt();
    let b = gn_wiener_norm(&WitnessSpec::scheduled(10, 2.0, 2.0).unwrap()) / (10.0 * LN_2).sqrt();
    assert!((a / b - 1.0).abs() < 0.2, "{a} vs {b}");
    let bands = gn_band_norms(&WitnessSpec::scheduled(6, 2.0, 2.0).unwrap());
    assert!(bands.iter().all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn classification_rules() {
    assert_eq!(classify(&[1.0, 1.3, 1.7], MODULATION_GROWTH).0, TrendVerdict::BlowUp);
    assert_eq!(classify(&[1.0, 1.05, 1.08], MODULATION_GROWTH).0, TrendVerdict::Bounded);
    assert_eq!(classify(&[1.0, 1.15, 1.5], MODULATION_GROWTH).0, TrendVerdict::Inconclusive);
    assert_eq!(classify(&[0.0, 0.0], MODULATION_GROWTH).0, TrendVerdict::Bounded);
    assert_eq!(expected_trend(ConditionVerdict::SharpFinite), TrendVerdict::Bounded);
    assert_eq!(expected_trend(ConditionVerdict::DivergentSharp), TrendVerdict::BlowUp);
}

#[test]
fn shallow_schedule_separates_kernels() {
    // Two shallow depths are enough to see the log-divergent kernel grow
    // while the compactly supported one stays put.
    let settings = WitnessSettings::default();
    let schedule = [(6, 1), (8, 2)];
    let div = lower_bound_experiment_modulation(&divergent_kernel(), &schedule, 2.0, 2.0, &settings).unwrap();
    let ann = lower_bound_experiment_modulation(&annulus_kernel(), &schedule, 2.0, 2.0, &settings).unwrap();
    assert!(div.rows[1].ratio > div.rows[0].ratio);
    assert!(ann.spread <= BOUNDED_SPREAD, "{}", ann.spread);
}
