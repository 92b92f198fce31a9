//! Hurst estimates from IRS values (with delta-method confidence intervals)
//! and a generalized quadratic variation (GQV) baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::irs::{increments, irs, localized_irs, IncrementSeries, LocalWindow};
use crate::stats::normal_quantile;
use crate::synthesis::{Provenance, SamplePath};
use crate::theory::link::{H_MAX, H_MIN};
use crate::theory::{clt_applies, LinkFunction, Sigma2Table};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_POINTS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Irs,
    Gqv,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "irs" => Ok(Method::Irs),
            "gqv" => Ok(Method::Gqv),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// One point estimate. `t` is `None` for a global estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub t: Option<f64>,
    pub irs: Option<f64>,
    pub h_hat: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub count: usize,
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub t: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub method: Method,
    pub filter: String,
    pub gamma: Option<f64>,
    pub alpha: f64,
    pub estimates: Vec<Estimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `t_j = j / (count + 1)`, `j = 1..=count`.
pub fn default_t_points(count: usize) -> Vec<f64> {
    (1..=count).map(|j| j as f64 / (count + 1) as f64).collect()
}

/// Reusable IRS estimator: link function, variance table and CI level.
#[derive(Clone, Debug)]
pub struct IrsEstimator {
    link: LinkFunction,
    sigma2: Sigma2Table,
    alpha: f64,
    z: f64,
}

impl IrsEstimator {
    /// Uses the shipped variance table for the filter.
    pub fn new(filter: &Filter, alpha: f64) -> Result<Self> {
        let table = Sigma2Table::builtin(filter)
            .ok_or_else(|| Error::NoVarianceTable(filter.to_string()))?;
        Self::with_table(table, alpha)
    }

    pub fn with_table(sigma2: Sigma2Table, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} not in (0, 1)")));
        }
        let link = LinkFunction::new(sigma2.filter())?;
        Ok(IrsEstimator {
            link,
            sigma2,
            alpha,
            z: normal_quantile(1.0 - alpha / 2.0),
        })
    }

    pub fn filter(&self) -> &Filter {
        self.link.filter()
    }

    pub fn link(&self) -> &LinkFunction {
        &self.link
    }

    pub fn sigma2_table(&self) -> &Sigma2Table {
        &self.sigma2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Inverts `irs_value` and attaches a delta-method CI from an effective
    /// sample size `count`: `z sqrt(Sigma^2(H)/count) / |Lambda'(H)|`.
    pub fn point(&self, t: Option<f64>, irs_value: f64, count: usize) -> Result<Estimate> {
        let inv = self.link.inverse(irs_value)?;
        let h = inv.hurst;
        if inv.saturation.is_some() {
            return Ok(Estimate {
                t,
                irs: Some(irs_value),
                h_hat: h,
                ci_lo: Some(h),
                ci_hi: Some(h),
                count,
                saturated: true,
            });
        }
        let slope = self.link.derivative(h)?.abs();
        let s2 = self.sigma2.interpolate(h).max(0.0);
        let half = self.z * (s2 / count as f64).sqrt() / slope;
        Ok(Estimate {
            t,
            irs: Some(irs_value),
            h_hat: h,
            ci_lo: Some((h - half).clamp(H_MIN, H_MAX)),
            ci_hi: Some((h + half).clamp(H_MIN, H_MAX)),
            count,
            saturated: false,
        })
    }

    fn report(&self, gamma: Option<f64>) -> EstimationReport {
        EstimationReport {
            method: Method::Irs,
            filter: self.filter().to_string(),
            gamma,
            alpha: self.alpha,
            estimates: Vec::new(),
            skipped: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn clt_warnings(&self, h: f64, est: &Estimate, warnings: &mut Vec<String>) {
        if est.saturated {
            warnings.push(format!(
                "IRS {} outside the attainable band; estimate saturated at {h}",
                est.irs.unwrap_or(f64::NAN)
            ));
        } else if !clt_applies(self.filter(), h) {
            warnings.push(format!(
                "CLT condition violated: first-order filter with H = {h:.4} >= 0.75"
            ));
        }
        if !est.saturated && !self.sigma2.covers(h) {
            warnings.push(format!("variance table extrapolated at H = {h:.4}"));
        }
    }

    /// Global estimate `Lambda_a^{-1}(IRS)` with a CI at rate `sqrt(n)`.
    pub fn estimate_global(&self, path: &SamplePath) -> Result<EstimationReport> {
        let required = 100 * (self.filter().length() + 1);
        if path.values().len() < required {
            return Err(Error::PathTooShort {
                n: path.n(),
                required,
            });
        }
        let inc = increments(path, self.filter())?;
        let value = irs(&inc)?;
        let est = self.point(None, value, path.n())?;
        let mut report = self.report(None);
        self.clt_warnings(est.h_hat, &est, &mut report.warnings);
        report.estimates.push(est);
        Ok(report)
    }

    /// Local estimates at each `t*` from the IRS on the window
    /// `|t_k - t*| <= n^{-gamma}`; the CI uses the window's pair count.
    pub fn estimate_local(
        &self,
        path: &SamplePath,
        gamma: f64,
        t_points: &[f64],
    ) -> Result<EstimationReport> {
        let inc = increments(path, self.filter())?;
        let mut report = self.report(Some(gamma));
        if let Some(w) = holder_warning(path, gamma) {
            report.warnings.push(w);
        }
        for &t in t_points {
            let window = LocalWindow::new(path.n(), self.filter().length(), gamma, t)?;
            match localized_irs(&inc, &window) {
                Ok(local) => {
                    let est = self.point(Some(t), local.value, local.pairs)?;
                    self.clt_warnings(est.h_hat, &est, &mut report.warnings);
                    report.estimates.push(est);
                }
                Err(e @ Error::WindowTooSmall { .. }) => report.skipped.push(SkippedPoint {
                    t,
                    reason: e.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
        Ok(report)
    }
}

fn holder_warning(path: &SamplePath, gamma: f64) -> Option<String> {
    match path.provenance() {
        Provenance::Mbm { hurst_fn } if !hurst_fn.is_constant() => {
            let eta = hurst_fn.holder_eta();
            (gamma * (1.0 + eta) <= 1.0).then(|| {
                format!("gamma (1 + eta) = {:.3} <= 1: local CLT not guaranteed", gamma * (1.0 + eta))
            })
        }
        _ => None,
    }
}

/// Global IRS estimate with the shipped variance table.
pub fn estimate_global(path: &SamplePath, filter: &Filter, alpha: f64) -> Result<EstimationReport> {
    IrsEstimator::new(filter, alpha)?.estimate_global(path)
}

/// Local IRS estimates with the shipped variance table.
pub fn estimate_local(
    path: &SamplePath,
    filter: &Filter,
    gamma: f64,
    t_points: &[f64],
    alpha: f64,
) -> Result<EstimationReport> {
    IrsEstimator::new(filter, alpha)?.estimate_local(path, gamma, t_points)
}

fn mean_square(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
}

fn gqv_ratio(v1: f64, v2: f64) -> Result<f64> {
    if !(v1 > 0.0 && v2 > 0.0) {
        return Err(Error::NonPositiveVariation);
    }
    Ok(0.5 * (v2 / v1).log2())
}

fn gqv_estimate(t: Option<f64>, raw: f64, count: usize) -> Estimate {
    let h_hat = raw.clamp(H_MIN, H_MAX);
    Estimate {
        t,
        irs: None,
        h_hat,
        ci_lo: None,
        ci_hi: None,
        count,
        saturated: h_hat != raw,
    }
}

/// Increments at the original filter and at the filter dilated by 2.
fn gqv_increments(path: &SamplePath, filter: &Filter) -> Result<(IncrementSeries, IncrementSeries)> {
    Ok((increments(path, filter)?, increments(path, &filter.dilated(2))?))
}

/// GQV baseline: `H = log2(V2 / V1) / 2` from the mean squared increments
/// at dilations 1 and 2, globally or on the windows around `t_points`.
pub fn estimate_gqv(
    path: &SamplePath,
    filter: &Filter,
    local: Option<(f64, &[f64])>,
) -> Result<EstimationReport> {
    let (inc1, inc2) = gqv_increments(path, filter)?;
    let mut report = EstimationReport {
        method: Method::Gqv,
        filter: filter.to_string(),
        gamma: local.map(|(g, _)| g),
        alpha: DEFAULT_ALPHA,
        estimates: Vec::new(),
        skipped: Vec::new(),
        warnings: Vec::new(),
    };
    match local {
        None => {
            let raw = gqv_ratio(mean_square(inc1.values()), mean_square(inc2.values()))?;
            report.estimates.push(gqv_estimate(None, raw, inc1.len()));
        }
        Some((gamma, t_points)) => {
            for &t in t_points {
                let w = LocalWindow::new(path.n(), filter.length(), gamma, t)?;
                let hi1 = w.hi.min(inc1.len() - 1);
                let hi2 = w.hi.min(inc2.len().saturating_sub(1));
                let count = hi1 + 1 - w.lo;
                if count < crate::irs::MIN_WINDOW_PAIRS || w.lo > hi2 {
                    report.skipped.push(SkippedPoint {
                        t,
                        reason: format!("window holds only {count} increments"),
                    });
                    continue;
                }
                let raw = gqv_ratio(
                    mean_square(&inc1.values()[w.lo..=hi1]),
                    mean_square(&inc2.values()[w.lo..=hi2]),
                )?;
                report.estimates.push(gqv_estimate(Some(t), raw, count));
            }
        }
    }
    Ok(report)
}
