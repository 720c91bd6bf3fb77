//! Independent numerical oracles for the exact integrals.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stodom_core::dominance::pair_integrals;
use stodom_core::{d_iq_distance, fsd_violation_ratio, ssd_violation_ratio, EmpiricalDistribution, Order};

/// Dense midpoint evaluation of quantiles and integrated quantiles straight
/// from the sorted samples. The grid is a multiple of 60 so every
/// breakpoint `i/n` with `n <= 6` falls on a cell boundary.
struct DenseOracle {
    grid: usize,
}

impl DenseOracle {
    fn quantile(sorted: &[f64], t: f64) -> f64 {
        let n = sorted.len();
        let mut idx = 0;
        while ((idx + 1) as f64) < t * n as f64 {
            idx += 1;
        }
        sorted[idx.min(n - 1)]
    }

    /// Returns (fsd violation, fsd total, ssd violation, ssd total).
    fn integrals(&self, x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
        let mut xs = x.to_vec();
        let mut ys = y.to_vec();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let h = 1.0 / self.grid as f64;
        let (mut f_pos, mut f_tot, mut s_pos, mut s_tot) = (0.0, 0.0, 0.0, 0.0);
        let (mut gx, mut gy) = (0.0, 0.0);
        for i in 0..self.grid {
            let t = (i as f64 + 0.5) * h;
            let (qx, qy) = (Self::quantile(&xs, t), Self::quantile(&ys, t));
            let d = qy - qx;
            f_tot += d * d * h;
            if d > 0.0 {
                f_pos += d * d * h;
            }
            // integrated quantiles at the midpoint: half a cell of the current step
            let gd = (gy + 0.5 * h * qy) - (gx + 0.5 * h * qx);
            s_tot += gd * gd * h;
            if gd > 0.0 {
                s_pos += gd * gd * h;
            }
            gx += h * qx;
            gy += h * qy;
        }
        (f_pos, f_tot, s_pos, s_tot)
    }
}

fn random_discrete(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let support = rng.random_range(1..=6);
    let atoms: Vec<f64> = (0..support).map(|_| rng.random_range(-5..=5) as f64).collect();
    let n = rng.random_range(1..=6);
    (0..n).map(|_| atoms[rng.random_range(0..support)]).collect()
}

fn dist(v: &[f64]) -> EmpiricalDistribution {
    EmpiricalDistribution::from_samples(v).unwrap()
}

#[test]
fn exact_ratios_match_dense_quadrature() {
    let oracle = DenseOracle { grid: 60 * 2_000 };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 150 {
        let (a, b) = (random_discrete(&mut rng), random_discrete(&mut rng));
        let (x, y) = (dist(&a), dist(&b));
        let (f_pos, f_tot, s_pos, s_tot) = oracle.integrals(&a, &b);
        let pi = pair_integrals(&x, &y);
        assert!((pi.total(Order::First) - f_tot).abs() < 1e-8, "{a:?} {b:?}");
        assert!((pi.total(Order::Second) - s_tot).abs() < 1e-6, "{a:?} {b:?}");
        if f_tot < 1e-9 {
            continue;
        }
        assert!((fsd_violation_ratio(&x, &y).value - f_pos / f_tot).abs() < 1e-6, "{a:?} {b:?}");
        if s_tot > 1e-6 {
            assert!((ssd_violation_ratio(&x, &y).value - s_pos / s_tot).abs() < 1e-4, "{a:?} {b:?}");
        }
        checked += 1;
    }
}

#[test]
fn ssd_example_with_crossing_point() {
    let oracle = DenseOracle { grid: 600_000 };
    let (a, b) = ([0.0, 3.0], [1.0, 1.0]);
    let (_, _, s_pos, s_tot) = oracle.integrals(&a, &b);
    assert!((s_pos - 1.0 / 16.0).abs() < 1e-9);
    assert!((s_tot - 1.0 / 12.0).abs() < 1e-9);
    assert!((d_iq_distance(&dist(&a), &dist(&b)).powi(2) - s_tot).abs() < 1e-9);
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integrated_quantile_is_convex_and_ends_at_mean(v in samples(), p in 0.001f64..1.0, q in 0.001f64..1.0) {
        let d = dist(&v);
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        let gp = d.integrated_quantile_at(p).unwrap();
        let gq = d.integrated_quantile_at(q).unwrap();
        let qp = d.quantile_at(p).unwrap();
        prop_assert!(gq - gp >= (q - p) * qp - 1e-9 * (1.0 + d.scale()));
        prop_assert!(d.quantile_at(q).unwrap() >= qp);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let g1 = d.integrated_quantile_at(1.0).unwrap();
        prop_assert!((g1 - mean).abs() <= 1e-12 * mean.abs().max(d.scale()).max(1e-300));
        prop_assert_eq!(d.quantile_at(1.0).unwrap(), d.max());
        prop_assert!(d.cdf_at(d.quantile_at(p).unwrap()) >= p - 1e-12);
    }

    #[test]
    fn resample_draws_from_original_values(v in samples(), seed in any::<u64>(), it in 0u64..1000) {
        let d = dist(&v);
        let r = d.resample(v.len(), stodom_core::BootstrapSeed::new(seed, it)).unwrap();
        prop_assert_eq!(r.len(), v.len());
        for x in r.values() {
            prop_assert!(d.values().contains(x));
        }
        prop_assert!(r.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ratios_are_scale_shift_invariant(a in samples(), b in samples(), scale in 0.01f64..50.0, shift in -100.0f64..100.0) {
        let (x, y) = (dist(&a), dist(&b));
        let map = |v: &[f64]| dist(&v.iter().map(|t| scale * t + shift).collect::<Vec<_>>());
        let (xt, yt) = (map(&a), map(&b));
        for order in Order::BOTH {
            let r = stodom_core::dominance::violation_ratio(&x, &y, order);
            let rt = stodom_core::dominance::violation_ratio(&xt, &yt, order);
            if !r.degenerate && !rt.degenerate {
                prop_assert!((r.value - rt.value).abs() < 1e-6, "{:?} {} vs {}", order, r.value, rt.value);
            }
        }
    }

    #[test]
    fn complement_identity(a in samples(), b in samples()) {
        let (x, y) = (dist(&a), dist(&b));
        for order in Order::BOTH {
            let xy = stodom_core::dominance::violation_ratio(&x, &y, order);
            let yx = stodom_core::dominance::violation_ratio(&y, &x, order);
            prop_assert!((xy.value + yx.value - 1.0).abs() < 1e-10);
            prop_assert!((0.0..=1.0).contains(&xy.value));
        }
    }

    #[test]
    fn fsd_implies_ssd(a in samples(), b in samples(), gap in 0.0f64..3.0) {
        let x = dist(&a);
        // pushing every order statistic of y below x's makes x dominate in FSD
        let y_vals: Vec<f64> = x.values().iter().zip(b.iter().cycle()).map(|(v, w)| v - gap - w.abs() * 0.01).collect();
        let y = dist(&y_vals);
        for (p, q) in [(&x, &y), (&y, &x), (&x, &dist(&b))] {
            if fsd_violation_ratio(p, q).value == 0.0 {
                prop_assert_eq!(ssd_violation_ratio(p, q).value, 0.0);
            }
        }
    }

    #[test]
    fn d_iq_metric_axioms(a in samples(), b in samples(), c in samples()) {
        let (x, y, z) = (dist(&a), dist(&b), dist(&c));
        prop_assert_eq!(d_iq_distance(&x, &y), d_iq_distance(&y, &x));
        prop_assert_eq!(d_iq_distance(&x, &x), 0.0);
        prop_assert!(d_iq_distance(&x, &z) <= d_iq_distance(&x, &y) + d_iq_distance(&y, &z) + 1e-12 * (1.0 + x.scale().max(y.scale()).max(z.scale())));
    }
}
