//! Monte Carlo estimates of the IRS asymptotic variance `Sigma_a^2(H)`.
//!
//! `Sigma_a^2(H)` is the limit of `n Var(IRS_{a,n}(B_H))`. It has no closed
//! form, so it is estimated from independent replicate paths and stored in a
//! table indexed by `H`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::clt_applies;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::filters::Filter;
use crate::irs::{increments, irs};
use crate::seed;
use crate::stats::{jackknife_variance_se, sample_variance};
use crate::synthesis::{fbm_from_sampler, FgnSampler};

pub const MIN_REPLICATES: usize = 100;

/// Grid resolution of the shipped tables.
pub const TABLE_STEP: f64 = 0.05;

const BINOMIAL1_TABLE: &str = include_str!("../../data/sigma2_binomial1.csv");
const BINOMIAL2_TABLE: &str = include_str!("../../data/sigma2_binomial2.csv");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub sigma2: f64,
    pub std_error: f64,
    pub method: String,
    pub hurst: f64,
    pub filter: Filter,
    pub n: usize,
    pub replicates: usize,
    /// First-order filter with `H >= 3/4`: no CLT, the value is not a limit.
    pub clt_condition_violated: bool,
}

/// IRS values of `replicates` independent fBm paths; replicate `r` uses
/// seed `derive(seed, r)`.
pub fn irs_replicates(
    filter: &Filter,
    hurst: f64,
    n: usize,
    replicates: usize,
    seed_value: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    let sampler = FgnSampler::new(hurst, n)?;
    exec.map_indexed(replicates, |r| {
        let path = fbm_from_sampler(&sampler, seed::derive(seed_value, r as u64));
        irs(&increments(&path, filter)?)
    })
    .into_iter()
    .collect()
}

/// `n * sampleVar(IRS)` over replicates with a jackknife standard error.
pub fn sigma2_mc(
    filter: &Filter,
    hurst: f64,
    n: usize,
    replicates: usize,
    seed_value: u64,
    exec: Execution,
) -> Result<VarianceEstimate> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    let values = irs_replicates(filter, hurst, n, replicates, seed_value, exec)?;
    let nf = n as f64;
    let var = sample_variance(&values).expect("replicates >= 2");
    let se = jackknife_variance_se(&values).expect("replicates >= 3");
    Ok(VarianceEstimate {
        sigma2: nf * var,
        // Strictly positive even for a degenerate sample.
        std_error: (nf * se).max(f64::MIN_POSITIVE),
        method: "replicate_mc".into(),
        hurst,
        filter: filter.clone(),
        n,
        replicates,
        clt_condition_violated: !clt_applies(filter, hurst),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sigma2Entry {
    pub hurst: f64,
    pub sigma2: f64,
    pub std_error: f64,
    pub n: usize,
    pub replicates: usize,
}

/// `Sigma_a^2` tabulated on an increasing `H` grid, linearly interpolated
/// and clamped at the ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Sigma2Table {
    filter: Filter,
    entries: Vec<Sigma2Entry>,
}

impl Sigma2Table {
    pub fn new(filter: Filter, mut entries: Vec<Sigma2Entry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty variance table".into()));
        }
        entries.sort_by(|a, b| a.hurst.total_cmp(&b.hurst));
        if entries.windows(2).any(|w| w[0].hurst == w[1].hurst) {
            return Err(Error::InvalidArgument("duplicate H in variance table".into()));
        }
        Ok(Sigma2Table { filter, entries })
    }

    /// Shipped tables exist for the first- and second-difference filters.
    pub fn builtin(filter: &Filter) -> Option<Sigma2Table> {
        let text = match filter.binomial_order() {
            Some(1) => BINOMIAL1_TABLE,
            Some(2) => BINOMIAL2_TABLE,
            _ => return None,
        };
        Some(Self::from_csv(filter.clone(), text.as_bytes()).expect("shipped table parses"))
    }

    /// Default grid: `0.05, 0.10, ...`, stopping below 3/4 for first-order
    /// filters where the variance diverges.
    pub fn default_grid(filter: &Filter) -> Vec<f64> {
        (1..=19)
            .map(|i| i as f64 * TABLE_STEP)
            .filter(|h| clt_applies(filter, *h))
            .map(|h| (h * 100.0).round() / 100.0)
            .collect()
    }

    pub fn generate(
        filter: &Filter,
        hursts: &[f64],
        n: usize,
        replicates: usize,
        seed_value: u64,
        exec: Execution,
    ) -> Result<Sigma2Table> {
        let entries = hursts
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let est = sigma2_mc(filter, h, n, replicates, seed::derive(seed_value, i as u64), exec)?;
                Ok(Sigma2Entry {
                    hurst: h,
                    sigma2: est.sigma2,
                    std_error: est.std_error,
                    n,
                    replicates,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(filter.clone(), entries)
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn entries(&self) -> &[Sigma2Entry] {
        &self.entries
    }

    pub fn covers(&self, hurst: f64) -> bool {
        let (lo, hi) = (self.entries[0].hurst, self.entries[self.entries.len() - 1].hurst);
        (lo..=hi).contains(&hurst)
    }

    pub fn interpolate(&self, hurst: f64) -> f64 {
        let e = &self.entries;
        if hurst <= e[0].hurst {
            return e[0].sigma2;
        }
        if hurst >= e[e.len() - 1].hurst {
            return e[e.len() - 1].sigma2;
        }
        let i = e.partition_point(|x| x.hurst <= hurst);
        let (a, b) = (&e[i - 1], &e[i]);
        let w = (hurst - a.hurst) / (b.hurst - a.hurst);
        a.sigma2 + w * (b.sigma2 - a.sigma2)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv<R: Read>(filter: Filter, input: R) -> Result<Sigma2Table> {
        let mut r = csv::Reader::from_reader(input);
        let entries = r
            .deserialize()
            .collect::<std::result::Result<Vec<Sigma2Entry>, _>>()?;
        Self::new(filter, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_tables_load() {
        let t2 = Sigma2Table::builtin(&Filter::binomial(2)).unwrap();
        assert_eq!(t2.entries().len(), 19);
        assert!(t2.entries().iter().all(|e| e.sigma2 > 0.0 && e.std_error > 0.0));
        let t1 = Sigma2Table::builtin(&Filter::binomial(1)).unwrap();
        assert!(t1.entries().iter().all(|e| e.hurst < 0.75));
        assert!(Sigma2Table::builtin(&Filter::binomial(3)).is_none());
    }

    #[test]
    fn interpolation_is_linear_and_clamped() {
        let f = Filter::binomial(2);
        let e = |h, s| Sigma2Entry {
            hurst: h,
            sigma2: s,
            std_error: 0.01,
            n: 100,
            replicates: 100,
        };
        let t = Sigma2Table::new(f.clone(), vec![e(0.5, 2.0), e(0.1, 1.0)]).unwrap();
        assert_eq!(t.interpolate(0.3), 1.5);
        assert_eq!(t.interpolate(0.0), 1.0);
        assert_eq!(t.interpolate(0.9), 2.0);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(Sigma2Table::from_csv(f.clone(), &buf[..]).unwrap(), t);
        assert!(Sigma2Table::new(f, vec![e(0.5, 1.0), e(0.5, 2.0)]).is_err());
    }

    #[test]
    fn flags_first_order_above_three_quarters() {
        let d1 = Filter::new(vec![1.0, -1.0], 1).unwrap();
        let est = sigma2_mc(&d1, 0.8, 256, 100, 1, Execution::Sequential).unwrap();
        assert!(est.clt_condition_violated);
        assert!(est.sigma2 > 0.0);
        let ok = sigma2_mc(&Filter::binomial(2), 0.8, 256, 100, 1, Execution::Sequential).unwrap();
        assert!(!ok.clt_condition_violated);
        assert!(sigma2_mc(&d1, 0.5, 256, 50, 1, Execution::Sequential).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let f = Filter::binomial(2);
        let a = sigma2_mc(&f, 0.4, 512, 120, 9, Execution::Parallel).unwrap();
        let b = sigma2_mc(&f, 0.4, 512, 120, 9, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_grids() {
        assert_eq!(Sigma2Table::default_grid(&Filter::binomial(2)).len(), 19);
        let g1 = Sigma2Table::default_grid(&Filter::binomial(1));
        assert_eq!(g1.last().copied(), Some(0.7));
    }
}
