//! Closed-form limits of the IRS for fBm and the covariance structure of
//! generalized increments.

pub mod link;
pub mod sigma2;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::filters::Filter;

pub use link::{lambda_a_inverse, Inversion, LinkFunction, Saturation};
pub use sigma2::{sigma2_mc, Sigma2Table, VarianceEstimate};

/// `E psi(G1, G2)` for a standard bivariate Gaussian pair with correlation `r`:
/// `arccos(-r)/pi + sqrt((1+r)/(1-r)) log(2/(1+r)) / pi`.
pub fn lambda0(r: f64) -> Result<f64> {
    if !(r > -1.0 && r < 1.0) {
        return Err(Error::DomainError(r));
    }
    Ok(((-r).acos() + ((1.0 + r) / (1.0 - r)).sqrt() * (2.0 / (1.0 + r)).ln()) / PI)
}

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Hurst index {hurst} not in (0, 1)")))
    }
}

/// Lag-one correlation of generalized fBm increments, closed forms for the
/// first- and second-difference filters only.
pub fn rho_a_closed(filter: &Filter, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    let h2 = 2.0 * hurst;
    match filter.binomial_order() {
        Some(1) => Ok(2f64.powf(h2 - 1.0) - 1.0),
        Some(2) => Ok((-(3f64.powf(h2)) + 2f64.powf(h2 + 2.0) - 7.0) / (8.0 - 2f64.powf(h2 + 1.0))),
        _ => Err(Error::UnsupportedFilter(filter.to_string())),
    }
}

/// `C_a(j) = sum_{l1,l2} a_l1 a_l2 |j + l2 - l1|^{2H}`.
pub fn c_a(filter: &Filter, lag: i64, hurst: f64) -> f64 {
    let a = filter.coeffs();
    let h2 = 2.0 * hurst;
    let mut total = 0.0;
    for (l1, a1) in a.iter().enumerate() {
        for (l2, a2) in a.iter().enumerate() {
            let d = (lag + l2 as i64 - l1 as i64).unsigned_abs() as f64;
            // 0^{2H} = 0 for H > 0.
            if d > 0.0 {
                total += a1 * a2 * d.powf(h2);
            }
        }
    }
    total
}

/// `cov(Delta_a B_H(t_0), Delta_a B_H(t_j)) = -C_a(j) / (2 n^{2H})`.
pub fn r_a_n(filter: &Filter, lag: i64, hurst: f64, n: usize) -> f64 {
    -c_a(filter, lag, hurst) / (2.0 * (n as f64).powf(2.0 * hurst))
}

/// `C_a(j) / C_a(0)`, independent of `n`.
pub fn normalized_autocov(filter: &Filter, lag: i64, hurst: f64) -> f64 {
    c_a(filter, lag, hurst) / c_a(filter, 0, hurst)
}

/// `rho_a(H) = C_a(1) / C_a(0)` for any valid filter.
pub fn rho_a_general(filter: &Filter, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    let den = c_a(filter, 0, hurst);
    if den.abs() < 1e-300 {
        return Err(Error::DegenerateDenominator(filter.to_string()));
    }
    Ok(c_a(filter, 1, hurst) / den)
}

/// `Lambda_a(H) = Lambda_0(rho_a(H))`, the IRS limit for fBm.
pub fn lambda_a(filter: &Filter, hurst: f64) -> Result<f64> {
    lambda0(rho_a_general(filter, hurst)?)
}

/// Generalized binomial coefficient `prod_{k<m} (x - k) / m!`.
pub fn binom_real(x: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, k| acc * (x - k as f64) / (k + 1) as f64)
}

/// Leading term of `C_a(j)` as `j -> infinity`:
/// `binom(2H, 2p) (-1)^p C(2p, p) (sum_l a_l l^p)^2 j^{2H-2p}`.
///
/// The Taylor expansion of `|j + l2 - l1|^{2H}` carries the signed power
/// `(l2 - l1)^{2p}`, and its double sum against the filter picks up the
/// central binomial factor `(-1)^p C(2p, p)` in front of the squared moment.
pub fn c_a_tail(filter: &Filter, lag: f64, hurst: f64) -> f64 {
    let p = filter.order();
    let mp = filter.moment(p);
    let central = binom_real(2.0 * p as f64, p) * if p % 2 == 0 { 1.0 } else { -1.0 };
    binom_real(2.0 * hurst, 2 * p) * central * mp * mp * lag.powf(2.0 * hurst - 2.0 * p as f64)
}

/// Whether `sum_j r_a(j)^2` converges: `H < p - 1/4`.
pub fn square_summable(filter: &Filter, hurst: f64) -> bool {
    hurst < filter.order() as f64 - 0.25
}

/// Whether the fBm IRS central limit theorem covers `(filter, H)`:
/// `H < 3/4` for first-order filters, any `H` otherwise.
pub fn clt_applies(filter: &Filter, hurst: f64) -> bool {
    filter.order() >= 2 || hurst < 0.75
}
