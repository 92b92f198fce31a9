//! Exact but cubic-cost fBm sampling through the Cholesky factor of the
//! full covariance matrix. Used as a distributional oracle.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::fbm_covariance;
use crate::error::{Error, Result};

/// Largest grid accepted by the oracle.
pub const MAX_ORACLE_N: usize = 4096;

#[derive(Clone, Debug)]
pub struct CholeskySampler {
    hurst: f64,
    n: usize,
    lower: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(hurst: f64, n: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidArgument(format!("Hurst index {hurst} not in (0, 1)")));
        }
        if !(1..=MAX_ORACLE_N).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "oracle grid n={n} outside 1..={MAX_ORACLE_N}"
            )));
        }
        Self::from_kernel(hurst, n, fbm_covariance)
    }

    /// Factorizes `kernel(H, t_i, t_j)` over `t_i = i/n`, `i = 1..=n`.
    pub fn from_kernel(
        hurst: f64,
        n: usize,
        kernel: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        let t = |i: usize| (i + 1) as f64 / n as f64;
        let cov = DMatrix::from_fn(n, n, |i, j| kernel(hurst, t(i), t(j)));
        let chol = cov.cholesky().ok_or(Error::NotPositiveDefinite)?;
        Ok(CholeskySampler {
            hurst,
            n,
            lower: chol.unpack(),
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Path values `X(t_0) = 0, X(t_1), ..., X(t_n)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &self.lower * z;
        std::iter::once(0.0).chain(x.iter().copied()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn plus_sign_kernel_is_rejected() {
        let plus = |h: f64, s: f64, t: f64| {
            0.5 * (t.powf(2.0 * h) + s.powf(2.0 * h) + (t - s).abs().powf(2.0 * h))
        };
        match CholeskySampler::from_kernel(0.3, 32, plus) {
            Err(Error::NotPositiveDefinite) => {}
            other => panic!("expected factorization failure, got {other:?}"),
        }
    }

    #[test]
    fn oracle_bounds() {
        assert!(CholeskySampler::new(0.5, MAX_ORACLE_N + 1).is_err());
        assert!(CholeskySampler::new(1.0, 8).is_err());
        let s = CholeskySampler::new(0.5, 8).unwrap();
        let x = s.sample(&mut seed::rng(0));
        assert_eq!(x.len(), 9);
        assert_eq!(x[0], 0.0);
    }
}
