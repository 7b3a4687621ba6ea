mod common;

use common::close;
use proptest::prelude::*;
use ucc_core::calibration::{apply_calibration, conformal_scale};
use ucc_core::cost::{interval_score, isocost_slope, mean_absolute_error_check, min_cost};
use ucc_core::curve::{
    auucc, auucc_gain, build_curve, partial_auucc, CoordinateSystem, Rule, Window,
};
use ucc_core::inference::compare_auucc;
use ucc_core::{bandwidth, metrics_at, miss_rate, scale_batch, Batch, Scale, UccError};

fn band() -> impl Strategy<Value = f64> {
    prop_oneof![6 => 0.01f64..10.0, 1 => Just(0.0), 1 => Just(1.0)]
}

fn error() -> impl Strategy<Value = f64> {
    prop_oneof![6 => -10.0f64..10.0, 1 => Just(0.0), 1 => Just(1.0)]
}

fn rows(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-5.0f64..5.0, error(), band(), band()), 1..max)
        .prop_map(|v| v.into_iter().map(|(yh, e, l, u)| (yh + e, yh, l, u)).collect())
}

fn batch(max: usize) -> impl Strategy<Value = Batch> {
    rows(max).prop_map(|r| Batch::from_bands(&r).unwrap())
}

fn symmetric_batch(max: usize) -> impl Strategy<Value = Batch> {
    rows(max).prop_map(|r| {
        let r: Vec<_> = r.into_iter().map(|(y, yh, l, _)| (y, yh, l, l)).collect();
        Batch::from_bands(&r).unwrap()
    })
}

/// Batches with at least one finite critical scale and no miss floor.
fn bounded_batch(max: usize) -> impl Strategy<Value = Batch> {
    prop::collection::vec((-5.0f64..5.0, error(), 0.01f64..10.0, 0.01f64..10.0), 1..max).prop_map(
        |v| {
            let r: Vec<_> = v.into_iter().map(|(yh, e, l, u)| (yh + e, yh, l, u)).collect();
            Batch::from_bands(&r).unwrap()
        },
    )
}

fn xy(b: &Batch, coords: CoordinateSystem) -> Vec<(f64, f64)> {
    build_curve(b, coords).unwrap().xy().collect()
}

proptest! {
    #[test]
    fn capture_scale_duality(b in batch(30), ks in prop::collection::vec(0.0f64..20.0, 5)) {
        for s in &b {
            let single = Batch::new(vec![*s]).unwrap();
            let missed = |k: f64| metrics_at(&single, Scale::new(k).unwrap()).miss_rate == 1.0;
            match s.critical_scale() {
                None => prop_assert!(ks.iter().all(|&k| missed(k))),
                Some(scale) => {
                    let t = scale.threshold();
                    prop_assert!(!missed(t));
                    if t > 0.0 {
                        prop_assert!(missed(t.next_down()));
                    }
                    for &k in &ks {
                        prop_assert_eq!(missed(k), k < t);
                    }
                }
            }
        }
    }

    #[test]
    fn miss_rate_is_a_decreasing_step(b in batch(30), mut ks in prop::collection::vec(0.0f64..20.0, 2..10)) {
        ks.sort_by(f64::total_cmp);
        let rates: Vec<f64> = ks.iter().map(|&k| miss_rate(&scale_batch(&b, k).unwrap())).collect();
        prop_assert!(rates.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn bandwidth_is_linear_in_scale(b in batch(30), k in 0.0f64..1e3) {
        let scaled = bandwidth(&scale_batch(&b, k).unwrap());
        prop_assert!(close(scaled, k * bandwidth(&b), 1e-14));
    }

    #[test]
    fn scaling_composes(b in batch(30), a in 0.0f64..50.0, c in 0.0f64..50.0) {
        let twice = scale_batch(&scale_batch(&b, a).unwrap(), c).unwrap();
        let once = scale_batch(&b, a * c).unwrap();
        for (s, t) in twice.iter().zip(&once) {
            prop_assert!(close(s.z_lower(), t.z_lower(), 1e-12));
            prop_assert!(close(s.z_upper(), t.z_upper(), 1e-12));
            prop_assert_eq!((s.y(), s.y_hat()), (t.y(), t.y_hat()));
        }
    }

    #[test]
    fn everything_is_permutation_invariant(
        b in bounded_batch(30),
        perm in any::<u64>(),
        k in 0.0f64..5.0,
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut samples = b.samples().to_vec();
        samples.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm));
        let shuffled = Batch::new(samples).unwrap();
        let scale = Scale::new(k).unwrap();
        prop_assert_eq!(metrics_at(&b, scale), metrics_at(&shuffled, scale));
        for coords in CoordinateSystem::ALL {
            let c1 = build_curve(&b, coords).unwrap();
            let c2 = build_curve(&shuffled, coords).unwrap();
            prop_assert_eq!(c1.points(), c2.points());
            for rule in [Rule::Rectangular, Rule::Trapezoidal] {
                prop_assert_eq!(auucc(&c1, rule).unwrap().to_bits(), auucc(&c2, rule).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn excess_plus_deficit_is_the_mae_term(b in symmetric_batch(40), k in 0.0f64..10.0) {
        let (cost, direct) = mean_absolute_error_check(&b, k).unwrap();
        prop_assert!(close(2.0 * cost, direct, 1e-12));
    }

    #[test]
    fn interval_score_decomposes(b in batch(40), k in 0.0f64..10.0, alpha in 0.01f64..0.99) {
        let scaled = scale_batch(&b, k).unwrap();
        let m = metrics_at(&scaled, Scale::ONE);
        let is = interval_score(&scaled, alpha).unwrap();
        prop_assert!(close(is, 2.0 * m.bandwidth + 2.0 / alpha * m.deficit, 1e-12));
    }

    #[test]
    fn curves_are_monotone_staircases(b in batch(40)) {
        for coords in CoordinateSystem::ALL {
            let curve = match build_curve(&b, coords) {
                Ok(c) => c,
                Err(e) => {
                    prop_assert_eq!(e, UccError::AllUnbounded);
                    prop_assert!(b.iter().all(|s| s.critical_scale().is_none()));
                    return Ok(());
                }
            };
            let p = curve.points();
            prop_assert_eq!(p[0].k, 0.0);
            prop_assert_eq!(p[0].x(coords), 0.0);
            prop_assert!(p.windows(2).all(|w| w[0].k < w[1].k));
            let pts: Vec<_> = curve.xy().collect();
            prop_assert!(pts.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 >= w[1].1));
            prop_assert_eq!(p.last().unwrap().miss_rate, curve.miss_floor());
        }
    }

    #[test]
    fn points_match_materialised_scaling(b in bounded_batch(40)) {
        let curve = build_curve(&b, CoordinateSystem::ExcessDeficit).unwrap();
        for p in curve.points() {
            let m = metrics_at(&scale_batch(&b, p.k).unwrap(), Scale::ONE);
            prop_assert_eq!(m.miss_rate, p.miss_rate);
            prop_assert!(close(m.bandwidth, p.bandwidth, 1e-12));
            prop_assert!(close(m.excess, p.excess, 1e-12));
            prop_assert!(close(m.deficit, p.deficit, 1e-12));
        }
    }

    #[test]
    fn curves_are_scale_invariant(b in bounded_batch(40), c in prop_oneof![Just(1e-3), Just(1.0), Just(1e3)]) {
        let scaled = scale_batch(&b, c).unwrap();
        for coords in CoordinateSystem::ALL {
            let a1 = xy(&b, coords);
            let a2 = xy(&scaled, coords);
            prop_assert_eq!(a1.len(), a2.len());
            for (p, q) in a1.iter().zip(&a2) {
                prop_assert!(close(p.0, q.0, 1e-12) && close(p.1, q.1, 1e-12));
            }
            let r1 = auucc(&build_curve(&b, coords).unwrap(), Rule::Rectangular).unwrap();
            let r2 = auucc(&build_curve(&scaled, coords).unwrap(), Rule::Rectangular).unwrap();
            prop_assert!(close(r1, r2, 1e-12));
        }
    }

    #[test]
    fn constant_bands_have_zero_gain(b in bounded_batch(40), z in 0.01f64..100.0) {
        let rows: Vec<_> = b.iter().map(|s| (s.y(), s.y_hat(), z, z)).collect();
        let constant = Batch::from_bands(&rows).unwrap();
        for coords in CoordinateSystem::ALL {
            match auucc_gain(&constant, coords, None, Rule::Rectangular) {
                Ok(g) => prop_assert_eq!(g.gain_percent, 0.0),
                Err(e) => prop_assert_eq!(e, UccError::DegenerateReference),
            }
        }
    }

    #[test]
    fn full_window_equals_full_area(b in bounded_batch(40)) {
        let curve = build_curve(&b, CoordinateSystem::BandwidthMissRate).unwrap();
        let w = Window::new(0.0, 1.0).unwrap();
        for rule in [Rule::Rectangular, Rule::Trapezoidal] {
            prop_assert_eq!(partial_auucc(&curve, w, rule).unwrap(), auucc(&curve, rule).unwrap());
        }
    }

    #[test]
    fn calibration_covers_its_own_batch(b in bounded_batch(60), alpha in 0.01f64..0.99) {
        match conformal_scale(&b, alpha) {
            Ok(r) => {
                prop_assert!(r.achieved_coverage >= 1.0 - alpha);
                let scaled = apply_calibration(&b, &r).unwrap();
                prop_assert!(miss_rate(&scaled) <= alpha);
                if let Ok(smaller) = conformal_scale(&b, alpha / 2.0) {
                    prop_assert!(smaller.q_hat >= r.q_hat);
                }
            }
            Err(UccError::InsufficientCalibrationData { rank, n }) => prop_assert!(rank > n),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn min_cost_is_the_smallest_candidate(b in bounded_batch(40), c in 0.0f64..=1.0) {
        let cc = min_cost(&b, c).unwrap();
        let smallest = cc.evaluations.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(cc.min_cost, smallest);
        let first = cc.evaluations.iter().find(|e| e.1 == smallest).unwrap();
        prop_assert_eq!(cc.k_star, first.0);
    }

    #[test]
    fn isocost_points_share_a_slope(c in 0.0f64..0.99, level in 0.0f64..2.0, x1 in 0.0f64..5.0, dx in 0.01f64..5.0) {
        let y = |x: f64| (level - c * x) / (1.0 - c);
        let x2 = x1 + dx;
        let slope = (y(x2) - y(x1)) / dx;
        prop_assert!(close(slope, isocost_slope(c).unwrap(), 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permutation_test_is_antisymmetric(
        v in prop::collection::vec((-5.0f64..5.0, -3.0f64..3.0, 0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0), 2..25),
        seed in any::<u64>(),
    ) {
        let a = Batch::from_bands(&v.iter().map(|&(yh, e, l, u, _)| (yh + e, yh, l, u)).collect::<Vec<_>>()).unwrap();
        let b = Batch::from_bands(&v.iter().map(|&(yh, e, _, _, z)| (yh + e, yh, z, z)).collect::<Vec<_>>()).unwrap();
        let coords = CoordinateSystem::BandwidthMissRate;
        let ab = compare_auucc(&a, &b, coords, 30, seed, None).unwrap();
        let ba = compare_auucc(&b, &a, coords, 30, seed, None).unwrap();
        prop_assert_eq!(ab.observed_diff, -ba.observed_diff);
        prop_assert_eq!(ab.p_value, ba.p_value);
        prop_assert_eq!(ab, compare_auucc(&a, &b, coords, 30, seed, None).unwrap());
        prop_assert!(ab.p_value > 0.0 && ab.p_value <= 1.0);
    }
}
