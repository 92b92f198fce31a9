//! Sample paths of fractional and multifractional Brownian motion on the
//! grid `t_k = k/n`, `k = 0..=n`, with unit scale (`Var B_H(1) = 1`).

pub mod cholesky;
pub mod circulant;
pub mod hurst_fn;
pub mod mbm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub use cholesky::CholeskySampler;
pub use circulant::FgnSampler;
pub use hurst_fn::{BuiltinHurst, HurstFunction, HurstKind};
pub use mbm::MbmSampler;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Fbm { hurst: f64 },
    Mbm { hurst_fn: HurstFunction },
    External,
}

/// Observed values `X(t_0), ..., X(t_n)` with `X(t_0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath {
    n: usize,
    values: Vec<f64>,
    provenance: Provenance,
    seed: Option<u64>,
}

impl SamplePath {
    /// Wraps externally observed values. The path is re-anchored so that it
    /// starts at zero; increment-based statistics are unaffected.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least two points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("path contains non-finite values".into()));
        }
        let origin = values[0];
        let values: Vec<f64> = values.into_iter().map(|v| v - origin).collect();
        Ok(SamplePath {
            n: values.len() - 1,
            values,
            provenance: Provenance::External,
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    /// `c * X`, keeping provenance.
    pub fn scaled(&self, c: f64) -> SamplePath {
        SamplePath {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// `X(t) + intercept + slope * t` (the result no longer starts at zero
    /// unless `intercept == 0`).
    pub fn with_trend(&self, intercept: f64, slope: f64) -> SamplePath {
        SamplePath {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| v + intercept + slope * self.time(k))
                .collect(),
            ..self.clone()
        }
    }
}

/// fBm covariance `(t^{2H} + s^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(hurst: f64, s: f64, t: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

fn check_fbm_args(hurst: f64, n: usize) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::InvalidArgument(format!("Hurst index {hurst} not in (0, 1)")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2".into()));
    }
    Ok(())
}

/// fBm path by circulant embedding of its increments.
pub fn simulate_fbm(hurst: f64, n: usize, seed_value: u64) -> Result<SamplePath> {
    check_fbm_args(hurst, n)?;
    let sampler = FgnSampler::new(hurst, n)?;
    Ok(fbm_from_sampler(&sampler, seed_value))
}

/// Same as [`simulate_fbm`] with a prebuilt sampler.
pub fn fbm_from_sampler(sampler: &FgnSampler, seed_value: u64) -> SamplePath {
    let inc = sampler.increments(&mut seed::rng(seed_value));
    SamplePath {
        n: sampler.len(),
        values: circulant::cumulative_path(&inc),
        provenance: Provenance::Fbm {
            hurst: sampler.hurst(),
        },
        seed: Some(seed_value),
    }
}

/// fBm path from the Cholesky factor of the full covariance matrix.
pub fn simulate_fbm_cholesky(hurst: f64, n: usize, seed_value: u64) -> Result<SamplePath> {
    check_fbm_args(hurst, n)?;
    let sampler = CholeskySampler::new(hurst, n)?;
    Ok(SamplePath {
        n,
        values: sampler.sample(&mut seed::rng(seed_value)),
        provenance: Provenance::Fbm { hurst },
        seed: Some(seed_value),
    })
}

/// Approximate mBm; see [`mbm`]. Constant Hurst functions reproduce
/// [`simulate_fbm`] bit for bit.
pub fn simulate_mbm(
    hurst_fn: &HurstFunction,
    n: usize,
    seed_value: u64,
    h_grid_size: usize,
) -> Result<SamplePath> {
    Ok(MbmSampler::new(hurst_fn.clone(), n, h_grid_size)?.sample(seed_value))
}

pub fn builtin_hurst_function(which: BuiltinHurst) -> HurstFunction {
    HurstFunction::builtin(which)
}
