//! Generalized increments and the increment ratio statistic (IRS).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::synthesis::SamplePath;

/// Windows with fewer consecutive pairs than this are rejected.
pub const MIN_WINDOW_PAIRS: usize = 8;

/// `Delta_a X(t_k) = sum_l a_l X(t_{k+l})` for `k = 0..n-L`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncrementSeries {
    filter: Filter,
    n: usize,
    values: Vec<f64>,
}

impl IncrementSeries {
    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> IncrementSeries {
        IncrementSeries {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// Wraps raw increment values, e.g. for testing the statistic itself.
    pub fn from_raw(filter: Filter, n: usize, values: Vec<f64>) -> Self {
        IncrementSeries { filter, n, values }
    }
}

/// Applies `filter` to a path observed on `n + 1` points.
pub fn increments(path: &SamplePath, filter: &Filter) -> Result<IncrementSeries> {
    increments_of(path.values(), filter)
}

/// Same as [`increments`] on a bare value slice `X(t_0..=t_n)`.
pub fn increments_of(values: &[f64], filter: &Filter) -> Result<IncrementSeries> {
    let n = values.len().saturating_sub(1);
    let l = filter.length();
    if n < l + 2 {
        return Err(Error::PathTooShort { n, required: l + 2 });
    }
    let a = filter.coeffs();
    let out = values
        .windows(l + 1)
        .take(n - l)
        .map(|w| w.iter().zip(a).map(|(x, c)| c * x).sum())
        .collect();
    Ok(IncrementSeries {
        filter: filter.clone(),
        n,
        values: out,
    })
}

/// `|x + y| / (|x| + |y|)`, and 1 when both vanish.
#[inline]
pub fn psi(x: f64, y: f64) -> f64 {
    let den = x.abs() + y.abs();
    if den < 1e-300 {
        1.0
    } else {
        (x + y).abs() / den
    }
}

fn mean_psi(values: &[f64]) -> f64 {
    let pairs = values.len() - 1;
    values.windows(2).map(|w| psi(w[0], w[1])).sum::<f64>() / pairs as f64
}

/// Mean of `psi` over the `len - 1` consecutive increment pairs.
pub fn irs(inc: &IncrementSeries) -> Result<f64> {
    if inc.len() < 2 {
        return Err(Error::TooFewIncrements(inc.len()));
    }
    Ok(mean_psi(&inc.values))
}

/// The increment indices `k` with `|t_k - t*| <= n^{-gamma}`, clipped to
/// the available range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalWindow {
    pub gamma: f64,
    pub t_star: f64,
    pub lo: usize,
    pub hi: usize,
}

impl LocalWindow {
    /// `n` is the path resolution, `filter_len` the filter's `L`.
    pub fn new(n: usize, filter_len: usize, gamma: f64, t_star: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidArgument(format!("gamma {gamma} not in (0, 1)")));
        }
        if !(t_star > 0.0 && t_star < 1.0) {
            return Err(Error::InvalidArgument(format!("t* {t_star} not in (0, 1)")));
        }
        if n < filter_len + 2 {
            return Err(Error::PathTooShort {
                n,
                required: filter_len + 2,
            });
        }
        let nf = n as f64;
        let half = Self::half_width(n, gamma);
        let last = (n - filter_len - 1) as f64;
        let lo = (nf * t_star - half).floor().max(0.0).min(last);
        let hi = (nf * t_star + half).floor().max(0.0).min(last);
        Ok(LocalWindow {
            gamma,
            t_star,
            lo: lo as usize,
            hi: hi as usize,
        })
    }

    /// `n^{1 - gamma}` in index units.
    pub fn half_width(n: usize, gamma: f64) -> f64 {
        (n as f64).powf(1.0 - gamma)
    }

    /// Unclipped cardinality `2 n^{1-gamma} + 1`.
    pub fn nominal_size(n: usize, gamma: f64) -> f64 {
        2.0 * Self::half_width(n, gamma) + 1.0
    }

    /// Number of pairs `(k, k+1)` with `k` in the window and `k + 1` valid.
    pub fn pair_count(&self, series_len: usize) -> usize {
        let last_pair = series_len.saturating_sub(2);
        if self.lo > last_pair {
            return 0;
        }
        self.hi.min(last_pair) + 1 - self.lo
    }
}

/// IRS value restricted to a window, with the pair count it averaged over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalIrs {
    pub value: f64,
    pub pairs: usize,
}

pub fn localized_irs(inc: &IncrementSeries, w: &LocalWindow) -> Result<LocalIrs> {
    let pairs = w.pair_count(inc.len());
    if pairs < MIN_WINDOW_PAIRS {
        return Err(Error::WindowTooSmall {
            t_star: w.t_star,
            pairs,
            min: MIN_WINDOW_PAIRS,
        });
    }
    let slice = &inc.values[w.lo..w.lo + pairs + 1];
    Ok(LocalIrs {
        value: mean_psi(slice),
        pairs,
    })
}
