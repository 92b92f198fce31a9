use irs_hurst::estimation::{default_t_points, estimate_gqv};
use irs_hurst::synthesis::HurstKind;
use irs_hurst::{
    estimate_global, estimate_local, run_fbm_table, simulate_fbm, simulate_mbm, BuiltinHurst, Error, Execution,
    ExperimentConfig, Filter, HurstFunction, Method,
};
use proptest::prelude::*;

fn b2() -> Filter {
    Filter::binomial(2)
}

#[test]
fn global_irs_accuracy_on_fixed_seeds() {
    for h in [0.3, 0.7] {
        for seed in [1, 2, 3] {
            let path = simulate_fbm(h, 10_000, seed).unwrap();
            let e = &estimate_global(&path, &b2(), 0.05).unwrap().estimates[0];
            assert!((e.h_hat - h).abs() < 0.02, "H={h} seed={seed}: {e:?}");
            assert!(e.ci_lo.unwrap() <= e.h_hat && e.h_hat <= e.ci_hi.unwrap());
            assert_eq!(e.count, 10_000);
        }
    }
}

#[test]
fn gqv_global_accuracy() {
    let path = simulate_fbm(0.5, 10_000, 42).unwrap();
    let e = &estimate_gqv(&path, &b2(), None).unwrap().estimates[0];
    assert!((e.h_hat - 0.5).abs() < 0.03, "{e:?}");
    assert!(e.ci_lo.is_none() && e.irs.is_none());
}

#[test]
fn local_estimates_on_builtin_mbm() {
    let per = simulate_mbm(&HurstFunction::builtin(BuiltinHurst::Periodic), 10_000, 42, 20).unwrap();
    let r = estimate_local(&per, &b2(), 0.3, &[0.5], 0.05).unwrap();
    assert!((r.estimates[0].h_hat - 0.8).abs() < 0.1, "{:?}", r.estimates[0]);

    let logi = simulate_mbm(&HurstFunction::builtin(BuiltinHurst::Logistic), 10_000, 42, 20).unwrap();
    let g = estimate_gqv(&logi, &b2(), Some((0.3, &[0.9]))).unwrap();
    assert!((g.estimates[0].h_hat - 0.6).abs() < 0.1, "{:?}", g.estimates[0]);
}

#[test]
fn constant_hurst_local_agrees_with_global() {
    let hf = HurstFunction::constant(0.4).unwrap();
    let path = simulate_mbm(&hf, 10_000, 17, 20).unwrap();
    let global = &estimate_global(&path, &b2(), 0.05).unwrap().estimates[0];
    let local = estimate_local(&path, &b2(), 0.3, &[0.25, 0.5, 0.75], 0.05).unwrap();
    assert!(local.warnings.is_empty());
    for e in &local.estimates {
        let half = |x: &irs_hurst::Estimate| (x.ci_hi.unwrap() - x.ci_lo.unwrap()) / 2.0;
        let joint = (half(e).powi(2) + half(global).powi(2)).sqrt();
        assert!((e.h_hat - global.h_hat).abs() <= joint, "{e:?} vs {global:?}");
        // Local windows hold about 2 n^{0.7} pairs.
        assert!(e.count > 1200 && e.count < 1300, "{}", e.count);
    }
}

#[test]
fn slow_holder_functions_warn() {
    let kind = HurstKind::Linear {
        intercept: 0.3,
        slope: 0.4,
    };
    let path = simulate_mbm(&HurstFunction::new(kind).unwrap(), 4096, 1, 20).unwrap();
    // gamma (1 + eta) = 0.8 <= 1.
    let r = estimate_local(&path, &b2(), 0.4, &[0.5], 0.05).unwrap();
    assert_eq!(r.warnings.len(), 1);
    assert!(estimate_local(&path, &b2(), 0.6, &[0.5], 0.05).unwrap().warnings.is_empty());
}

#[test]
fn wide_gamma_skips_every_point() {
    let path = simulate_fbm(0.5, 10_000, 1).unwrap();
    let ts = default_t_points(5);
    let r = estimate_local(&path, &b2(), 0.9, &ts, 0.05).unwrap();
    assert!(r.estimates.is_empty());
    assert_eq!(r.skipped.len(), 5);
    let g = estimate_gqv(&path, &b2(), Some((0.9, &ts))).unwrap();
    assert_eq!(g.skipped.len(), 5);
}

#[test]
fn linear_trend_is_degenerate() {
    let values: Vec<f64> = (0..=2000).map(|k| 0.5 + 0.25 * k as f64).collect();
    let path = irs_hurst::SamplePath::from_values(values).unwrap();
    let e = &estimate_global(&path, &b2(), 0.05).unwrap().estimates[0];
    assert_eq!(e.irs, Some(1.0));
    assert!(e.saturated);
    assert!(matches!(estimate_gqv(&path, &b2(), None), Err(Error::NonPositiveVariation)));
}

#[test]
fn mean_estimates_are_ordered_in_h() {
    let means: Vec<f64> = [0.3, 0.5, 0.7]
        .iter()
        .map(|&h| {
            let mut cfg = ExperimentConfig::fbm(h);
            cfg.replicates = 200;
            run_fbm_table(&cfg, Execution::Parallel).unwrap().summary(Method::Irs).unwrap().mean_h
        })
        .collect();
    assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
}

#[test]
fn confidence_interval_coverage() {
    let mut cfg = ExperimentConfig::fbm(0.5);
    cfg.replicates = 500;
    cfg.master_seed = 5;
    let r = run_fbm_table(&cfg, Execution::Parallel).unwrap();
    let cov = r.summary(Method::Irs).unwrap().coverage.unwrap();
    assert!((0.90..=0.98).contains(&cov), "coverage {cov}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn estimates_are_scale_invariant(k in -20i32..20, c in 0.01f64..100.0, neg: bool, seed in 0u64..1000) {
        let path = simulate_fbm(0.35, 1024, seed).unwrap();
        let base = estimate_global(&path, &b2(), 0.05).unwrap().estimates[0].h_hat;
        let base_gqv = estimate_gqv(&path, &b2(), None).unwrap().estimates[0].h_hat;
        let pow2 = if neg { -(2f64.powi(k)) } else { 2f64.powi(k) };
        let p = path.scaled(pow2);
        prop_assert_eq!(estimate_global(&p, &b2(), 0.05).unwrap().estimates[0].h_hat, base);
        prop_assert_eq!(estimate_gqv(&p, &b2(), None).unwrap().estimates[0].h_hat, base_gqv);
        let q = path.scaled(c);
        prop_assert!((estimate_global(&q, &b2(), 0.05).unwrap().estimates[0].h_hat - base).abs() <= 1e-12);
        prop_assert!((estimate_gqv(&q, &b2(), None).unwrap().estimates[0].h_hat - base_gqv).abs() <= 1e-12);
    }
}
