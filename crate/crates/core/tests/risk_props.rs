use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use stodom_core::risk::{gini_tail, gini_tail_bound_holds, DEFAULT_TAIL_LEVELS};
use stodom_core::{mean_risk_score, ssd_violation_ratio, summarize, EmpiricalDistribution, RiskMeasure};

fn dist(v: &[f64]) -> EmpiricalDistribution {
    EmpiricalDistribution::from_samples(v).unwrap()
}

fn consistent_measures() -> Vec<RiskMeasure> {
    let mut out = vec![RiskMeasure::Delta, RiskMeasure::Gamma];
    for p in DEFAULT_TAIL_LEVELS {
        out.push(RiskMeasure::NegTvar(p));
        out.push(RiskMeasure::H(p));
    }
    out
}

/// Mean-preserving spread of `x` shifted down: `x` dominates the result in SSD.
fn dominated_by(x: &[f64], spread: f64, shift: f64) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| mean + spread * (v - mean) - shift).collect()
}

#[test]
fn ssd_implies_mean_risk_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut pairs = 0;
    while pairs < 500 {
        let n = rng.random_range(2..60);
        let x: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let y = dominated_by(&x, rng.random_range(1.0..3.0), rng.random_range(0.0..1.0));
        let (dx, dy) = (dist(&x), dist(&y));
        if ssd_violation_ratio(&dx, &dy).value != 0.0 {
            continue;
        }
        pairs += 1;
        let (sx, sy) = (
            summarize(&dx, &DEFAULT_TAIL_LEVELS).unwrap(),
            summarize(&dy, &DEFAULT_TAIL_LEVELS).unwrap(),
        );
        for risk in consistent_measures() {
            let a = mean_risk_score(&sx, risk, 1.0).unwrap();
            let b = mean_risk_score(&sy, risk, 1.0).unwrap();
            assert!(a >= b - 1e-10, "{risk}: {a} < {b}");
        }
    }
}

#[test]
fn gini_tail_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-4..=4) as f64).collect();
        let d = dist(&v);
        let grid = 60_000;
        let h = 1.0 / grid as f64;
        let mut acc = 0.0;
        for i in 0..grid {
            // Simpson on each cell; the integrand is piecewise quadratic and
            // breakpoints fall on cell edges.
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let f = |p: f64| d.mean() * p - d.integrated_quantile_at(p.max(1e-300)).unwrap();
            acc += h / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        }
        assert!((gini_tail(&d) - 2.0 * acc).abs() < 1e-8, "{v:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gini_bound_holds(a in prop::collection::vec(-50.0f64..50.0, 1..50), b in prop::collection::vec(-50.0f64..50.0, 1..50)) {
        let (x, y) = (dist(&a), dist(&b));
        let eps = ssd_violation_ratio(&x, &y).value;
        prop_assert!(gini_tail_bound_holds(&x, &y, eps));
        prop_assert!(gini_tail_bound_holds(&y, &x, 1.0 - eps));
    }

    #[test]
    fn summary_identities(v in prop::collection::vec(-10.0f64..10.0, 1..80)) {
        let s = summarize(&dist(&v), &DEFAULT_TAIL_LEVELS).unwrap();
        prop_assert!(s.sigma >= 0.0 && s.delta >= 0.0 && s.gamma >= 0.0);
        prop_assert_eq!(s.tvar_at(1.0).unwrap(), s.mu);
        for p in DEFAULT_TAIL_LEVELS {
            let h = s.h_at(p).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!((h - (s.mu - s.tvar_at(p).unwrap()).max(0.0)).abs() < 1e-12);
        }
    }
}
