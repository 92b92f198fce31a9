use irs_hurst::estimation::estimate_gqv;
use irs_hurst::io::write_path_csv;
use irs_hurst::seed;
use irs_hurst::stats::{ks_two_sample, mean, sample_variance};
use irs_hurst::synthesis::{fbm_covariance, fbm_from_sampler, CholeskySampler, FgnSampler};
use irs_hurst::{estimate_local, simulate_fbm, simulate_mbm, BuiltinHurst, Filter, HurstFunction};

/// Max over entries of |sample cov - exact| in standard errors.
fn worst_cov_z(paths: &[Vec<f64>], exact: impl Fn(usize, usize) -> f64, idx: &[usize]) -> f64 {
    let m = paths.len() as f64;
    let mut worst: f64 = 0.0;
    for (a, &s) in idx.iter().enumerate() {
        for &t in &idx[a..] {
            let prods: Vec<f64> = paths.iter().map(|p| p[s] * p[t]).collect();
            let se = (sample_variance(&prods).unwrap() / m).sqrt();
            worst = worst.max((mean(&prods) - exact(s, t)).abs() / se);
        }
    }
    worst
}

#[test]
fn cholesky_oracle_matches_covariance() {
    let n = 64;
    let idx = [1, 5, 16, 33, 50, 64];
    for h in [0.5, 0.3] {
        let chol = CholeskySampler::new(h, n).unwrap();
        let paths: Vec<Vec<f64>> = (0..10_000)
            .map(|r| chol.sample(&mut seed::rng(seed::derive(3, r))))
            .collect();
        let z = worst_cov_z(&paths, |s, t| fbm_covariance(h, s as f64 / 64.0, t as f64 / 64.0), &idx);
        assert!(z < 5.0, "H={h}: {z:.2} SE");
    }
    // Brownian case is min(s, t).
    assert!((fbm_covariance(0.5, 0.3, 0.7) - 0.3).abs() < 1e-15);
}

#[test]
fn circulant_and_cholesky_increment_covariances_agree() {
    let n = 64;
    for h in [0.3, 0.5, 0.7] {
        let circ = FgnSampler::new(h, n).unwrap();
        let chol = CholeskySampler::new(h, n).unwrap();
        let diff = |p: &[f64]| p.windows(2).map(|w| w[1] - w[0]).collect::<Vec<f64>>();
        let a: Vec<Vec<f64>> = (0..10_000)
            .map(|r| diff(fbm_from_sampler(&circ, seed::derive(4, r)).values()))
            .collect();
        let b: Vec<Vec<f64>> = (0..10_000)
            .map(|r| diff(&chol.sample(&mut seed::rng(seed::derive(5, r)))))
            .collect();
        let mut worst: f64 = 0.0;
        for i in (0..n).step_by(9) {
            for j in (i..n).step_by(7) {
                let stat = |ps: &[Vec<f64>]| {
                    let v: Vec<f64> = ps.iter().map(|p| p[i] * p[j]).collect();
                    (mean(&v), sample_variance(&v).unwrap() / v.len() as f64)
                };
                let ((ma, va), (mb, vb)) = (stat(&a), stat(&b));
                worst = worst.max((ma - mb).abs() / (va + vb).sqrt());
            }
        }
        assert!(worst < 5.0, "H={h}: {worst:.2} SE");
    }
}

#[test]
fn endpoint_marginals_ks() {
    let (h, n) = (0.7, 32);
    let circ = FgnSampler::new(h, n).unwrap();
    let chol = CholeskySampler::new(h, n).unwrap();
    let a: Vec<f64> = (0..4000).map(|r| fbm_from_sampler(&circ, seed::derive(6, r)).values()[n]).collect();
    let b: Vec<f64> = (0..4000)
        .map(|r| chol.sample(&mut seed::rng(seed::derive(7, r)))[n])
        .collect();
    let ks = ks_two_sample(&a, &b);
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn variance_grows_like_t_to_the_2h() {
    let (n, m) = (1024, 2000);
    for h in [0.3, 0.7] {
        let sampler = FgnSampler::new(h, n).unwrap();
        let paths: Vec<Vec<f64>> = (0..m)
            .map(|r| fbm_from_sampler(&sampler, seed::derive(8, r as u64)).values().to_vec())
            .collect();
        let ks: Vec<usize> = (0..10).map(|i| 1 << i).collect();
        let pts: Vec<(f64, f64)> = ks
            .iter()
            .map(|&k| {
                let v = paths.iter().map(|p| p[k] * p[k]).sum::<f64>() / m as f64;
                ((k as f64 / n as f64).ln(), v.ln())
            })
            .collect();
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64,
            pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64,
        );
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 2.0 * h).abs() < 0.05, "H={h}: slope {slope}");
    }
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let render = || {
        let mut buf = Vec::new();
        write_path_csv(&simulate_fbm(0.3, 256, 99).unwrap(), &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

#[test]
fn linear_mbm_local_estimate_at_midpoint() {
    let hf = HurstFunction::builtin(BuiltinHurst::Linear);
    let path = simulate_mbm(&hf, 10_000, 42, 20).unwrap();
    let r = estimate_local(&path, &Filter::binomial(2), 0.3, &[0.5], 0.05).unwrap();
    assert!((r.estimates[0].h_hat - 0.5).abs() < 0.1, "{:?}", r.estimates[0]);
}

#[test]
fn logistic_mbm_smooths_after_the_jump() {
    let hf = HurstFunction::builtin(BuiltinHurst::Logistic);
    let path = simulate_mbm(&hf, 10_000, 42, 20).unwrap();
    let v = path.values();
    let msq = |lo: usize, hi: usize| {
        v[lo..=hi].windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / (hi - lo) as f64
    };
    // Rougher (H = 0.3) increments are much larger at this resolution.
    assert!(msq(0, 6000) > 10.0 * msq(8000, 10_000));
    let f = Filter::binomial(2);
    let r = estimate_gqv(&path, &f, Some((0.3, &[0.3, 0.9]))).unwrap();
    assert!(r.estimates[0].h_hat < r.estimates[1].h_hat);
}
