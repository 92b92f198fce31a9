//! Exact sampling of fractional Gaussian noise by circulant embedding
//! (Wood–Chan / Davies–Harte).

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Eigenvalues below `-NEG_TOL * max` are treated as a real failure.
const NEG_TOL: f64 = 1e-9;

/// Autocovariance of fGn sampled at step `1/n`:
/// `0.5 n^{-2H} (|j+1|^{2H} + |j-1|^{2H} - 2|j|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, n: usize, lag: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let j = lag as f64;
    let raw = (j + 1.0).powf(h2) + (j - 1.0).abs().powf(h2) - 2.0 * j.powf(h2);
    0.5 * raw * (n as f64).powf(-h2)
}

/// Smallest power of two `>= 2(n - 1)`.
pub fn embedding_size(n: usize) -> usize {
    (2 * n.saturating_sub(1)).max(2).next_power_of_two()
}

/// Draws the complex Gaussian vector that drives one sample.
pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Complex<f64>> {
    (0..m)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(re, im)
        })
        .collect()
}

/// Sampler for `n` consecutive fGn values with a fixed Hurst index. The
/// spectrum and FFT plan are computed once and reused across draws.
#[derive(Clone)]
pub struct FgnSampler {
    hurst: f64,
    n: usize,
    /// `sqrt(lambda_k / m)`
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FgnSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnSampler")
            .field("hurst", &self.hurst)
            .field("n", &self.n)
            .field("m", &self.scale.len())
            .finish()
    }
}

impl FgnSampler {
    pub fn new(hurst: f64, n: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::InvalidArgument(format!("Hurst index {hurst} not in (0, 1)")));
        }
        if n < 1 {
            return Err(Error::InvalidArgument("need at least one increment".into()));
        }
        let m = embedding_size(n);
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| Complex::new(fgn_autocovariance(hurst, n, j.min(m - j)), 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -NEG_TOL * max {
            return Err(Error::EmbeddingNotPsd { min, max });
        }
        let scale = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(FgnSampler {
            hurst,
            n,
            scale,
            fft,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Size of the circulant embedding.
    pub fn embedding_size(&self) -> usize {
        self.scale.len()
    }

    /// fGn values driven by a given noise vector of length `embedding_size()`.
    /// Reusing the same noise across samplers gives common random numbers.
    pub fn increments_from_noise(&self, noise: &[Complex<f64>]) -> Vec<f64> {
        assert_eq!(noise.len(), self.scale.len(), "noise length mismatch");
        let mut buf: Vec<Complex<f64>> = noise
            .iter()
            .zip(&self.scale)
            .map(|(z, s)| z * *s)
            .collect();
        self.fft.process(&mut buf);
        buf[..self.n].iter().map(|c| c.re).collect()
    }

    pub fn increments<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let noise = draw_noise(rng, self.scale.len());
        self.increments_from_noise(&noise)
    }
}

/// `0, d_0, d_0 + d_1, ...`
pub fn cumulative_path(increments: &[f64]) -> Vec<f64> {
    let mut values = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    values.push(acc);
    for d in increments {
        acc += d;
        values.push(acc);
    }
    values
}
