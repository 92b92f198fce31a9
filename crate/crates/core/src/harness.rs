//! Monte Carlo experiments: fBm accuracy tables, mBm MISE tables and the
//! IRS central limit check.
//!
//! Replicate `r` is simulated from `derive(master_seed, r)` and aggregation
//! folds replicates in index order, so reports do not depend on the
//! execution mode or on thread scheduling.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{default_t_points, estimate_gqv, Estimate, IrsEstimator, Method};
use crate::exec::Execution;
use crate::filters::Filter;
use crate::irs::{increments, irs};
use crate::seed;
use crate::stats::{ks_one_sample, mean, normal_cdf, sample_variance, Histogram, KsResult};
use crate::synthesis::mbm::DEFAULT_H_GRID;
use crate::synthesis::{fbm_from_sampler, FgnSampler, HurstFunction, MbmSampler, SamplePath};
use crate::theory::{clt_applies, lambda_a, sigma2::irs_replicates, Sigma2Table};

pub const HISTOGRAM_BINS: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scenario {
    Fbm { hurst: f64 },
    Mbm { hurst_fn: HurstFunction },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub replicates: usize,
    pub filter: Filter,
    pub gamma: Option<f64>,
    pub t_points: usize,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    pub alpha: f64,
    pub h_grid_size: usize,
}

impl ExperimentConfig {
    /// Desk-scale fBm defaults: `n = 10000`, `M = 200`, second differences.
    pub fn fbm(hurst: f64) -> Self {
        ExperimentConfig {
            scenario: Scenario::Fbm { hurst },
            n: 10_000,
            replicates: 200,
            filter: Filter::binomial(2),
            gamma: None,
            t_points: 0,
            master_seed: 1,
            methods: vec![Method::Irs],
            alpha: 0.05,
            h_grid_size: DEFAULT_H_GRID,
        }
    }

    /// Desk-scale mBm defaults: `M = 100`, `gamma = 0.3`, 50 points, IRS and GQV.
    pub fn mbm(hurst_fn: HurstFunction) -> Self {
        ExperimentConfig {
            scenario: Scenario::Mbm { hurst_fn },
            n: 10_000,
            replicates: 100,
            filter: Filter::binomial(2),
            gamma: Some(0.3),
            t_points: 50,
            master_seed: 1,
            methods: vec![Method::Irs, Method::Gqv],
            alpha: 0.05,
            h_grid_size: DEFAULT_H_GRID,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.replicates < 1 {
            return bad("replicates must be >= 1".into());
        }
        if self.n < 128 {
            return bad(format!("n = {} below 128", self.n));
        }
        if self.methods.is_empty() {
            return bad("no estimation method selected".into());
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return bad(format!("gamma {g} not in (0, 1)"));
            }
        }
        if let Scenario::Mbm { .. } = self.scenario {
            if self.gamma.is_none() || self.t_points == 0 {
                return bad("mBm experiments need gamma and t_points".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub replicate: usize,
    pub seed: u64,
    pub method: Method,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub successes: usize,
    /// Mean of `H_hat` (fBm) or of the curve average (mBm); NaN without successes.
    #[serde(deserialize_with = "nan_from_null")]
    pub mean_h: f64,
    /// `E|H_hat - H|^2` (fBm only).
    pub mse: Option<f64>,
    /// Mean over replicates of the per-point squared error average (mBm only).
    pub mise: Option<f64>,
    /// Sample variance of `sqrt(n) (IRS - Lambda_a(H))` (fBm, IRS only).
    pub clt_variance: Option<f64>,
    /// Fraction of CIs containing the true `H` (fBm, IRS only).
    pub coverage: Option<f64>,
    /// Set when a variance could not be formed from fewer than 2 replicates.
    pub degenerate_variance: bool,
    pub histogram: Option<Histogram>,
    /// fBm: `H_hat` per successful replicate.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub h_hats: Vec<f64>,
    /// mBm: evaluation points, true curve, mean estimated curve.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_points: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub true_curve: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mean_curve: Vec<Option<f64>>,
    /// mBm: estimated curve per successful replicate, `None` where skipped.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub integrated_sq_errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub config: ExperimentConfig,
    pub summaries: Vec<MethodSummary>,
    pub replicate_seeds: Vec<u64>,
    pub failures: Vec<ReplicateFailure>,
    pub wall_clock_secs: f64,
}

impl MonteCarloReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// JSON with the wall-clock field zeroed, for reproducibility checks.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.wall_clock_secs = 0.0;
        Ok(serde_json::to_string(&copy)?)
    }
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Integrated squared error of a curve against the truth, over the points
/// that were estimated.
pub fn integrated_sq_error(curve: &[Option<f64>], truth: &[f64]) -> f64 {
    let (sum, count) = curve
        .iter()
        .zip(truth)
        .filter_map(|(c, t)| c.map(|c| (c, t)))
        .fold((0.0, 0usize), |(s, k), (c, t)| (s + (c - t) * (c - t), k + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

fn irs_estimator(filter: &Filter, alpha: f64) -> Result<IrsEstimator> {
    IrsEstimator::new(filter, alpha)
}

struct FbmOutcome {
    estimate: Estimate,
}

fn fbm_replicate(
    path: &SamplePath,
    method: Method,
    irs_est: Option<&IrsEstimator>,
    filter: &Filter,
) -> Result<FbmOutcome> {
    let report = match method {
        Method::Irs => irs_est.expect("IRS estimator built").estimate_global(path)?,
        Method::Gqv => estimate_gqv(path, filter, None)?,
    };
    Ok(FbmOutcome {
        estimate: report.estimates.into_iter().next().expect("global estimate"),
    })
}

/// Accuracy of the global estimators on fBm replicates.
pub fn run_fbm_table(cfg: &ExperimentConfig, exec: Execution) -> Result<MonteCarloReport> {
    cfg.validate()?;
    let Scenario::Fbm { hurst } = cfg.scenario else {
        return Err(Error::InvalidArgument("run_fbm_table needs an fBm scenario".into()));
    };
    let started = Instant::now();
    let sampler = FgnSampler::new(hurst, cfg.n)?;
    let irs_est = if cfg.methods.contains(&Method::Irs) {
        Some(irs_estimator(&cfg.filter, cfg.alpha)?)
    } else {
        None
    };
    let seeds: Vec<u64> = (0..cfg.replicates as u64).map(|r| seed::derive(cfg.master_seed, r)).collect();

    let outcomes: Vec<Vec<Result<FbmOutcome>>> = exec.map_indexed(cfg.replicates, |r| {
        let path = fbm_from_sampler(&sampler, seeds[r]);
        cfg.methods
            .iter()
            .map(|&m| fbm_replicate(&path, m, irs_est.as_ref(), &cfg.filter))
            .collect()
    });

    let lambda = lambda_a(&cfg.filter, hurst)?;
    let sqrt_n = (cfg.n as f64).sqrt();
    let mut failures = Vec::new();
    let mut summaries = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let mut h_hats = Vec::new();
        let mut standardized = Vec::new();
        let mut covered = 0usize;
        for (r, per_method) in outcomes.iter().enumerate() {
            match &per_method[mi] {
                Ok(o) => {
                    h_hats.push(o.estimate.h_hat);
                    if let Some(v) = o.estimate.irs {
                        standardized.push(sqrt_n * (v - lambda));
                    }
                    if let (Some(lo), Some(hi)) = (o.estimate.ci_lo, o.estimate.ci_hi) {
                        if lo <= hurst && hurst <= hi {
                            covered += 1;
                        }
                    }
                }
                Err(e) => failures.push(ReplicateFailure {
                    replicate: r,
                    seed: seeds[r],
                    method,
                    error: e.to_string(),
                }),
            }
        }
        let ok = h_hats.len();
        let is_irs = method == Method::Irs;
        let clt_variance = if is_irs { sample_variance(&standardized) } else { None };
        summaries.push(MethodSummary {
            method,
            successes: ok,
            mean_h: if ok > 0 { mean(&h_hats) } else { f64::NAN },
            mse: (ok > 0).then(|| h_hats.iter().map(|h| (h - hurst).powi(2)).sum::<f64>() / ok as f64),
            mise: None,
            clt_variance,
            coverage: (is_irs && ok > 0).then(|| covered as f64 / ok as f64),
            degenerate_variance: ok < 2,
            histogram: (ok > 0).then(|| Histogram::from_values(&h_hats, HISTOGRAM_BINS)),
            h_hats,
            t_points: Vec::new(),
            true_curve: Vec::new(),
            mean_curve: Vec::new(),
            curves: Vec::new(),
            integrated_sq_errors: Vec::new(),
        });
    }
    Ok(MonteCarloReport {
        config: cfg.clone(),
        summaries,
        replicate_seeds: seeds,
        failures,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

fn local_curve(
    path: &SamplePath,
    method: Method,
    irs_est: Option<&IrsEstimator>,
    filter: &Filter,
    gamma: f64,
    t_points: &[f64],
) -> Result<Vec<Option<f64>>> {
    let report = match method {
        Method::Irs => irs_est
            .expect("IRS estimator built")
            .estimate_local(path, gamma, t_points)?,
        Method::Gqv => estimate_gqv(path, filter, Some((gamma, t_points)))?,
    };
    let mut curve = vec![None; t_points.len()];
    let mut it = report.estimates.iter().peekable();
    for (slot, t) in curve.iter_mut().zip(t_points) {
        if let Some(e) = it.next_if(|e| e.t == Some(*t)) {
            *slot = Some(e.h_hat);
        }
    }
    if curve.iter().all(Option::is_none) {
        return Err(Error::InvalidArgument("no evaluation point had a usable window".into()));
    }
    Ok(curve)
}

/// MISE of the local estimators on mBm replicates.
pub fn run_mbm_table(cfg: &ExperimentConfig, exec: Execution) -> Result<MonteCarloReport> {
    cfg.validate()?;
    let Scenario::Mbm { hurst_fn } = &cfg.scenario else {
        return Err(Error::InvalidArgument("run_mbm_table needs an mBm scenario".into()));
    };
    let started = Instant::now();
    let gamma = cfg.gamma.expect("validated");
    let sampler = MbmSampler::new(hurst_fn.clone(), cfg.n, cfg.h_grid_size)?;
    let irs_est = if cfg.methods.contains(&Method::Irs) {
        Some(irs_estimator(&cfg.filter, cfg.alpha)?)
    } else {
        None
    };
    let t_points = default_t_points(cfg.t_points);
    let truth: Vec<f64> = t_points.iter().map(|&t| hurst_fn.eval(t)).collect();
    let seeds: Vec<u64> = (0..cfg.replicates as u64).map(|r| seed::derive(cfg.master_seed, r)).collect();

    let outcomes: Vec<Vec<Result<Vec<Option<f64>>>>> = exec.map_indexed(cfg.replicates, |r| {
        let path = sampler.sample(seeds[r]);
        cfg.methods
            .iter()
            .map(|&m| local_curve(&path, m, irs_est.as_ref(), &cfg.filter, gamma, &t_points))
            .collect()
    });

    let mut failures = Vec::new();
    let mut summaries = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let mut curves = Vec::new();
        for (r, per_method) in outcomes.iter().enumerate() {
            match &per_method[mi] {
                Ok(c) => curves.push(c.clone()),
                Err(e) => failures.push(ReplicateFailure {
                    replicate: r,
                    seed: seeds[r],
                    method,
                    error: e.to_string(),
                }),
            }
        }
        let ok = curves.len();
        let ises: Vec<f64> = curves.iter().map(|c| integrated_sq_error(c, &truth)).collect();
        let mean_curve: Vec<Option<f64>> = (0..t_points.len())
            .map(|j| {
                let vals: Vec<f64> = curves.iter().filter_map(|c| c[j]).collect();
                (!vals.is_empty()).then(|| mean(&vals))
            })
            .collect();
        let curve_means: Vec<f64> = curves
            .iter()
            .map(|c| mean(&c.iter().flatten().copied().collect::<Vec<_>>()))
            .collect();
        summaries.push(MethodSummary {
            method,
            successes: ok,
            mean_h: if ok > 0 { mean(&curve_means) } else { f64::NAN },
            mse: None,
            mise: (ok > 0).then(|| mean(&ises)),
            clt_variance: None,
            coverage: None,
            degenerate_variance: ok < 2,
            histogram: (ok > 0).then(|| Histogram::from_values(&curve_means, HISTOGRAM_BINS)),
            h_hats: Vec::new(),
            t_points: t_points.clone(),
            true_curve: truth.clone(),
            mean_curve,
            curves,
            integrated_sq_errors: ises,
        });
    }
    Ok(MonteCarloReport {
        config: cfg.clone(),
        summaries,
        replicate_seeds: seeds,
        failures,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

/// Normality of the standardized IRS `sqrt(n) (IRS - Lambda_a(H)) / Sigma_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub filter: Filter,
    pub hurst: f64,
    pub n: usize,
    pub replicates: usize,
    pub lambda_a: f64,
    /// From the shipped table when available; `None` where the CLT fails.
    pub sigma2: Option<f64>,
    pub clt_condition_violated: bool,
    pub irs_values: Vec<f64>,
    pub standardized: Vec<f64>,
    pub ks: Option<KsResult>,
    /// `sampleVar(sqrt(n) (IRS - Lambda_a)) / Sigma^2`.
    pub variance_ratio: Option<f64>,
}

pub fn run_clt_check(
    filter: &Filter,
    hurst: f64,
    n: usize,
    replicates: usize,
    seed_value: u64,
    exec: Execution,
) -> Result<CltReport> {
    run_clt_check_with(filter, hurst, n, replicates, seed_value, exec, Sigma2Table::builtin(filter))
}

/// As [`run_clt_check`] with an explicit variance table.
pub fn run_clt_check_with(
    filter: &Filter,
    hurst: f64,
    n: usize,
    replicates: usize,
    seed_value: u64,
    exec: Execution,
    table: Option<Sigma2Table>,
) -> Result<CltReport> {
    if replicates < 3 {
        return Err(Error::InvalidArgument("need at least 3 replicates".into()));
    }
    let lambda = lambda_a(filter, hurst)?;
    let violated = !clt_applies(filter, hurst);
    let irs_values = irs_replicates(filter, hurst, n, replicates, seed_value, exec)?;
    let sqrt_n = (n as f64).sqrt();
    let centred: Vec<f64> = irs_values.iter().map(|v| sqrt_n * (v - lambda)).collect();
    let sigma2 = if violated {
        None
    } else {
        let table = table.ok_or_else(|| Error::NoVarianceTable(filter.to_string()))?;
        Some(table.interpolate(hurst))
    };
    let (standardized, ks, variance_ratio) = match sigma2 {
        Some(s2) if s2 > 0.0 => {
            let s = s2.sqrt();
            let z: Vec<f64> = centred.iter().map(|c| c / s).collect();
            let ks = ks_one_sample(&z, normal_cdf);
            let ratio = sample_variance(&centred).map(|v| v / s2);
            (z, Some(ks), ratio)
        }
        _ => (centred, None, None),
    };
    Ok(CltReport {
        filter: filter.clone(),
        hurst,
        n,
        replicates,
        lambda_a: lambda,
        sigma2,
        clt_condition_violated: violated,
        irs_values,
        standardized,
        ks,
        variance_ratio,
    })
}

/// IRS of one path, for callers that only need the statistic.
pub fn path_irs(path: &SamplePath, filter: &Filter) -> Result<f64> {
    irs(&increments(path, filter)?)
}
