use proptest::prelude::*;
use qvf::simkit::ShotCounts;
use qvf::stats::*;
use std::collections::BTreeSet;

/// Φ(z) by Simpson integration of the normal density from 0.
fn phi_oracle(z: f64) -> f64 {
    let n = 20_000;
    let h = z / n as f64;
    let f = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = f(0.0) + f(z);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    0.5 + s * h / 3.0
}

#[test]
fn confidence_at_two_sigma() {
    assert!((confidence(2.0) - 97.725).abs() < 0.001);
}

#[test]
fn confidence_matches_quadrature() {
    for z in [-3.0, -1.2, 0.3, 1.0, 2.0, 2.25, 4.0] {
        assert!((confidence(z) - 100.0 * phi_oracle(z)).abs() < 1e-8, "z = {z}");
    }
    assert!((confidence(2.25) - 98.778).abs() < 0.001);
}

#[test]
fn reported_run_is_a_pass() {
    // 900 circuits averaging 0.701.
    let h: Vec<f64> = (0..900).map(|i| if i % 2 == 0 { 0.651 } else { 0.751 }).collect();
    let s = aggregate(&h).unwrap();
    assert!((s.h_mean - 0.701).abs() < 1e-12);
    assert!((2.0 * s.sigma - 0.031).abs() < 0.001);
    assert!(s.z > 2.1 && s.z < 2.3);
    assert!(s.confidence > 98.2 && s.confidence < 99.0);
    assert!(s.passed);
}

#[test]
fn threshold_mean_fails() {
    // Power-of-two counts keep the mean exactly 2/3.
    let s = aggregate(&[2.0 / 3.0; 8]).unwrap();
    assert_eq!(s.z, 0.0);
    assert_eq!(s.confidence, 50.0);
    assert!(!s.passed);
    let rule = PassRule::default();
    assert!(!HopStats::from_summary(900, 2.0 / 3.0, 0.0, rule).passed);
    assert!(HopStats::from_summary(900, 2.0 / 3.0 + 1e-9, 0.0, rule).passed);
}

#[test]
fn hop_counts_heavy_shots() {
    let mut c = ShotCounts::default();
    for b in ["00", "01", "01", "11"] {
        c.add(b.to_string());
    }
    let heavy: BTreeSet<String> = ["01".to_string(), "11".to_string()].into();
    assert_eq!(hop_of_counts(&c, &heavy).unwrap(), 0.75);
    assert!(hop_of_counts(&ShotCounts::default(), &heavy).is_err());
}

#[test]
fn constant_trace_is_flat() {
    let t = cumulative_trace(&[0.7; 50]).unwrap();
    assert!(t.iter().all(|r| (r.mean - 0.7).abs() < 1e-12));
    // Band half-width scales as 1/√k.
    let w = |r: &TraceRow| r.hi - r.mean;
    assert!((w(&t[0]) * (2.0f64).sqrt() - w(&t[48]) * 50f64.sqrt()).abs() < 1e-12);
}

#[test]
fn bootstrap_agrees_with_binomial_estimate() {
    let h: Vec<f64> = (0..400).map(|i| if i % 10 < 7 { 1.0 } else { 0.0 }).collect();
    let a = aggregate(&h).unwrap();
    let b = aggregate_bootstrap(&h, 10_000, 3, PassRule::default()).unwrap();
    assert!((a.sigma - b.sigma).abs() < 0.1 * a.sigma);
    assert_eq!(b, aggregate_bootstrap(&h, 10_000, 3, PassRule::default()).unwrap());
}

proptest! {
    #[test]
    fn last_trace_row_equals_aggregate(h in prop::collection::vec(0.0f64..=1.0, 2..60)) {
        let t = cumulative_trace(&h).unwrap();
        let s = aggregate(&h).unwrap();
        let last = t.last().unwrap();
        prop_assert_eq!(last.mean, s.h_mean);
        prop_assert_eq!(last.lo, s.h_mean - 2.0 * s.sigma);
    }

    #[test]
    fn order_does_not_matter(mut h in prop::collection::vec(0.0f64..=1.0, 2..60), seed in any::<u64>()) {
        let a = aggregate(&h).unwrap();
        use rand::seq::SliceRandom;
        h.shuffle(&mut qvf::rng::substream(seed, "perm", &[]));
        prop_assert_eq!(a, aggregate(&h).unwrap());
    }

    #[test]
    fn pass_iff_z_above_two(h in prop::collection::vec(0.5f64..=1.0, 2..80)) {
        let s = aggregate(&h).unwrap();
        prop_assert_eq!(s.passed, s.h_mean - 2.0 * s.sigma > 2.0 / 3.0 || (s.sigma == 0.0 && s.h_mean > 2.0 / 3.0));
        prop_assert!(s.sigma >= 0.0 && (0.0..=1.0).contains(&s.h_mean));
    }

    #[test]
    fn confidence_is_increasing(a in -6.0f64..6.0, d in 1e-3f64..1.0) {
        prop_assert!(confidence(a + d) > confidence(a));
    }
}
