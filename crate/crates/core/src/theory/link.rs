//! Tabulated `H -> Lambda_a(H)` with a bisection inverse.

use serde::{Deserialize, Serialize};

use super::{lambda_a, rho_a_general};
use crate::error::{Error, Result};
use crate::filters::Filter;

pub const H_MIN: f64 = 0.001;
pub const H_MAX: f64 = 0.999;
pub const TABLE_POINTS: usize = 2001;

/// Central-difference step for `Lambda_a'`.
pub const DERIVATIVE_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Saturation {
    Below,
    Above,
}

/// Result of inverting the link; saturated values sit at an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inversion {
    pub hurst: f64,
    pub saturation: Option<Saturation>,
}

#[derive(Clone, Debug)]
pub struct LinkFunction {
    filter: Filter,
    hs: Vec<f64>,
    values: Vec<f64>,
}

impl LinkFunction {
    /// Tabulates `Lambda_a` on `[0.001, 0.999]`; fails unless strictly
    /// increasing there.
    pub fn new(filter: &Filter) -> Result<Self> {
        let hs: Vec<f64> = (0..TABLE_POINTS)
            .map(|i| H_MIN + (H_MAX - H_MIN) * i as f64 / (TABLE_POINTS - 1) as f64)
            .collect();
        let values = hs
            .iter()
            .map(|&h| lambda_a(filter, h))
            .collect::<Result<Vec<_>>>()?;
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotMonotone(hs[i]));
        }
        Ok(LinkFunction {
            filter: filter.clone(),
            hs,
            values,
        })
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.hs.iter().copied().zip(self.values.iter().copied())
    }

    /// Attainable band `(Lambda_a(0.001), Lambda_a(0.999))`.
    pub fn band(&self) -> (f64, f64) {
        (self.values[0], self.values[self.values.len() - 1])
    }

    pub fn eval(&self, hurst: f64) -> Result<f64> {
        lambda_a(&self.filter, hurst)
    }

    pub fn rho(&self, hurst: f64) -> Result<f64> {
        rho_a_general(&self.filter, hurst)
    }

    /// `Lambda_a'(H)` by central difference, kept inside `(0, 1)`.
    pub fn derivative(&self, hurst: f64) -> Result<f64> {
        let h = DERIVATIVE_STEP;
        let lo = (hurst - h).max(H_MIN - h / 2.0);
        let hi = (hurst + h).min(H_MAX + h / 2.0);
        Ok((self.eval(hi)? - self.eval(lo)?) / (hi - lo))
    }

    /// `H` with `Lambda_a(H) = y`, clamped with a flag outside the band.
    pub fn inverse(&self, y: f64) -> Result<Inversion> {
        let (lo_y, hi_y) = self.band();
        if y.is_nan() {
            return Err(Error::InvalidArgument("cannot invert NaN".into()));
        }
        if y <= lo_y {
            return Ok(Inversion {
                hurst: H_MIN,
                saturation: Some(Saturation::Below),
            });
        }
        if y >= hi_y {
            return Ok(Inversion {
                hurst: H_MAX,
                saturation: Some(Saturation::Above),
            });
        }
        // Bracket from the table, then bisect on the exact function.
        let i = self.values.partition_point(|v| *v < y).clamp(1, self.values.len() - 1);
        let (mut a, mut b) = (self.hs[i - 1], self.hs[i]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let v = self.eval(mid)?;
            if v == y {
                a = mid;
                b = mid;
                break;
            }
            if v < y {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(Inversion {
            hurst: 0.5 * (a + b),
            saturation: None,
        })
    }
}

/// One-shot inverse; build a [`LinkFunction`] when inverting repeatedly.
pub fn lambda_a_inverse(filter: &Filter, y: f64) -> Result<Inversion> {
    LinkFunction::new(filter)?.inverse(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let link = LinkFunction::new(&Filter::binomial(2)).unwrap();
        let y = link.eval(0.7).unwrap();
        let inv = link.inverse(y).unwrap();
        assert!(inv.saturation.is_none());
        assert!((inv.hurst - 0.7).abs() < 1e-8);
        assert!((link.eval(inv.hurst).unwrap() - y).abs() < 1e-10);
        let half = link.inverse(0.588_101_4).unwrap();
        assert!((half.hurst - 0.5).abs() < 1e-6);
    }

    #[test]
    fn saturation_flags() {
        let link = LinkFunction::new(&Filter::binomial(2)).unwrap();
        let hi = link.inverse(0.99).unwrap();
        assert_eq!(hi.saturation, Some(Saturation::Above));
        assert_eq!(hi.hurst, H_MAX);
        let lo = link.inverse(0.1).unwrap();
        assert_eq!(lo.saturation, Some(Saturation::Below));
        assert_eq!(lo.hurst, H_MIN);
    }

    #[test]
    fn monotone_tables_for_binomials() {
        for p in 1..=4 {
            LinkFunction::new(&Filter::binomial(p)).unwrap();
        }
    }

    #[test]
    fn derivative_positive() {
        let link = LinkFunction::new(&Filter::binomial(2)).unwrap();
        for h in [0.001, 0.1, 0.5, 0.9, 0.999] {
            assert!(link.derivative(h).unwrap() > 0.0);
        }
    }
}
