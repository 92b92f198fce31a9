//! Approximate multifractional Brownian motion.
//!
//! A family of fBm paths is drawn on an equispaced grid of Hurst indices
//! from one shared noise vector, so that `H -> B_H(t)` is smooth at every
//! `t`. The mBm value at `t_k` is the monotone cubic (PCHIP) interpolant of
//! that family evaluated at `H(t_k)`.

use super::circulant::{cumulative_path, draw_noise, embedding_size, FgnSampler};
use super::hurst_fn::HurstFunction;
use super::{Provenance, SamplePath};
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_H_GRID: usize = 20;

/// Admissible Hurst range for synthesis, exclusive.
pub const RANGE_LIMITS: (f64, f64) = (0.01, 0.99);

#[derive(Clone, Debug)]
pub struct MbmSampler {
    hurst_fn: HurstFunction,
    n: usize,
    grid: Vec<f64>,
    samplers: Vec<FgnSampler>,
}

impl MbmSampler {
    pub fn new(hurst_fn: HurstFunction, n: usize, h_grid_size: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("need n >= 2".into()));
        }
        if h_grid_size < 2 {
            return Err(Error::InvalidArgument("H grid needs at least 2 points".into()));
        }
        let (lo, hi) = hurst_fn.range();
        if !(lo > RANGE_LIMITS.0 && hi < RANGE_LIMITS.1) {
            return Err(Error::RangeTooWide { lo, hi });
        }
        let grid: Vec<f64> = if hurst_fn.is_constant() {
            vec![lo]
        } else {
            (0..h_grid_size)
                .map(|i| lo + (hi - lo) * i as f64 / (h_grid_size - 1) as f64)
                .collect()
        };
        let samplers = grid
            .iter()
            .map(|&h| FgnSampler::new(h, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(MbmSampler {
            hurst_fn,
            n,
            grid,
            samplers,
        })
    }

    pub fn hurst_fn(&self) -> &HurstFunction {
        &self.hurst_fn
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn sample(&self, seed_value: u64) -> SamplePath {
        let mut rng = seed::rng(seed_value);
        let noise = draw_noise(&mut rng, embedding_size(self.n));
        let family: Vec<Vec<f64>> = self
            .samplers
            .iter()
            .map(|s| cumulative_path(&s.increments_from_noise(&noise)))
            .collect();

        let values = if family.len() == 1 {
            family.into_iter().next().unwrap()
        } else {
            let mut column = vec![0.0; self.grid.len()];
            (0..=self.n)
                .map(|k| {
                    for (c, path) in column.iter_mut().zip(&family) {
                        *c = path[k];
                    }
                    let h = self.hurst_fn.eval(k as f64 / self.n as f64);
                    pchip(&self.grid, &column, h)
                })
                .collect()
        };
        SamplePath {
            n: self.n,
            values,
            provenance: Provenance::Mbm {
                hurst_fn: self.hurst_fn.clone(),
            },
            seed: Some(seed_value),
        }
    }
}

/// Fritsch–Carlson monotone cubic Hermite interpolation at `x`.
/// `xs` strictly increasing, at least two knots; clamps outside the range.
pub fn pchip(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert!(n >= 2 && ys.len() == n);
    let x = x.clamp(xs[0], xs[n - 1]);
    let i = xs.partition_point(|v| *v <= x).clamp(1, n - 1) - 1;

    let secant = |j: usize| (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
    let width = |j: usize| xs[j + 1] - xs[j];
    let slope = |k: usize| -> f64 {
        if n == 2 {
            return secant(0);
        }
        if k == 0 || k == n - 1 {
            // One-sided three-point estimate, shape-preserving.
            let (j0, j1) = if k == 0 { (0, 1) } else { (n - 2, n - 3) };
            let (h0, h1) = (width(j0), width(j1));
            let (d0, d1) = (secant(j0), secant(j1));
            let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s.signum() != d0.signum() {
                s = 0.0;
            } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
                s = 3.0 * d0;
            }
            return s;
        }
        let (dl, dr) = (secant(k - 1), secant(k));
        if dl == 0.0 || dr == 0.0 || dl.signum() != dr.signum() {
            return 0.0;
        }
        let (hl, hr) = (width(k - 1), width(k));
        let (w1, w2) = (2.0 * hr + hl, hr + 2.0 * hl);
        (w1 + w2) / (w1 / dl + w2 / dr)
    };

    let h = width(i);
    let s = (x - xs[i]) / h;
    let (m0, m1) = (slope(i), slope(i + 1));
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * ys[i] + h10 * h * m0 + h01 * ys[i + 1] + h11 * h * m1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_hits_knots_and_reproduces_lines() {
        let xs = [0.0, 0.3, 0.5, 1.0];
        let ys = [1.0, 2.0, -1.0, 0.5];
        for (x, y) in xs.iter().zip(&ys) {
            assert!((pchip(&xs, &ys, *x) - y).abs() < 1e-14);
        }
        let line: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((pchip(&xs, &line, x) - (2.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pchip_preserves_monotone_data() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [0.0, 0.1, 0.2, 5.0, 5.1];
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let v = pchip(&xs, &ys, i as f64 / 100.0);
            assert!(v >= prev - 1e-12);
            assert!((0.0..=5.1 + 1e-12).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn smooth_function_is_interpolated_accurately() {
        let xs: Vec<f64> = (0..20).map(|i| 0.1 + 0.8 * i as f64 / 19.0).collect();
        let f = |h: f64| (3.0 * h).exp() * 0.2;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for i in 0..=100 {
            let x = 0.1 + 0.8 * i as f64 / 100.0;
            assert!((pchip(&xs, &ys, x) - f(x)).abs() < 1e-3 * f(x));
        }
    }

    #[test]
    fn range_limits_enforced() {
        use super::super::hurst_fn::HurstKind;
        let wide = HurstFunction::new(HurstKind::Linear {
            intercept: 0.005,
            slope: 0.5,
        })
        .unwrap();
        assert!(matches!(
            MbmSampler::new(wide, 100, 20),
            Err(Error::RangeTooWide { .. })
        ));
    }
}
