//! Generalized-increment filters.
//!
//! A filter `a = (a_0, ..., a_L)` of order `p` has `p` vanishing moments:
//! `sum_l a_l l^i = 0` for `i < p` and `sum_l a_l l^p != 0`. Applying it to a
//! sampled path gives the generalized increments used by the IRS and GQV
//! estimators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest supported filter (`L <= MAX_LENGTH`).
pub const MAX_LENGTH: usize = 32;

const FLOAT_TOL: f64 = 1e-12;

/// A validated filter with exactly `order` vanishing moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FilterRepr", into = "FilterRepr")]
pub struct Filter {
    coeffs: Vec<f64>,
    order: usize,
}

#[derive(Serialize, Deserialize)]
struct FilterRepr {
    coeffs: Vec<f64>,
    order: usize,
}

impl TryFrom<FilterRepr> for Filter {
    type Error = Error;
    fn try_from(r: FilterRepr) -> Result<Self> {
        Filter::new(r.coeffs, r.order)
    }
}

impl From<Filter> for FilterRepr {
    fn from(f: Filter) -> Self {
        FilterRepr {
            coeffs: f.coeffs,
            order: f.order,
        }
    }
}

impl Filter {
    /// Validates `coeffs` as a filter of order exactly `order`.
    pub fn new(coeffs: Vec<f64>, order: usize) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("filter has no coefficients".into()));
        }
        if order == 0 || order > coeffs.len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "order {order} must satisfy 1 <= p <= L = {}",
                coeffs.len() - 1
            )));
        }
        if coeffs.len() - 1 > MAX_LENGTH {
            return Err(Error::InvalidArgument(format!(
                "filter length L = {} exceeds {MAX_LENGTH}",
                coeffs.len() - 1
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        check_moments(&coeffs, order)?;
        Ok(Filter { coeffs, order })
    }

    /// Binomial filter `a_l = (-1)^(p-l) C(p, l)`, `l = 0..=p`.
    pub fn binomial(order: usize) -> Self {
        assert!(
            (1..=MAX_LENGTH).contains(&order),
            "binomial order must be in 1..={MAX_LENGTH}"
        );
        let coeffs = (0..=order)
            .map(|l| {
                let sign = if (order - l) % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial_coeff(order, l)
            })
            .collect();
        Filter { coeffs, order }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Number of vanishing moments `p`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `L`, one less than the number of taps.
    pub fn length(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `sum_l a_l l^i`.
    pub fn moment(&self, i: usize) -> f64 {
        float_moment(&self.coeffs, i)
    }

    /// `sum_{l1,l2} a_l1 a_l2 |l1 - l2|^m`, with `0^0 = 1`.
    pub fn double_moment_sum(&self, m: u32) -> f64 {
        let mut total = 0.0;
        for (l1, a1) in self.coeffs.iter().enumerate() {
            for (l2, a2) in self.coeffs.iter().enumerate() {
                let d = l1.abs_diff(l2) as f64;
                total += a1 * a2 * d.powi(m as i32);
            }
        }
        total
    }

    /// If the coefficients equal `±` a binomial filter, its order.
    pub fn binomial_order(&self) -> Option<usize> {
        let b = Filter::binomial(self.order);
        if b.coeffs.len() != self.coeffs.len() {
            return None;
        }
        let same = b.coeffs.iter().zip(&self.coeffs).all(|(x, y)| x == y);
        let negated = b.coeffs.iter().zip(&self.coeffs).all(|(x, y)| *x == -*y);
        (same || negated).then_some(self.order)
    }

    /// The filter with taps spread to lags `factor * l`; same order.
    pub fn dilated(&self, factor: usize) -> Filter {
        assert!(factor >= 1);
        let mut coeffs = vec![0.0; self.length() * factor + 1];
        for (l, a) in self.coeffs.iter().enumerate() {
            coeffs[l * factor] = *a;
        }
        // Dilation rescales moment i by factor^i, so vanishing moments are kept.
        Filter {
            coeffs,
            order: self.order,
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.binomial_order() {
            if *self == Filter::binomial(p) {
                return write!(f, "binomial:{p}");
            }
        }
        let taps: Vec<String> = self.coeffs.iter().map(|c| format!("{c}")).collect();
        write!(f, "coeffs:{}:p={}", taps.join(","), self.order)
    }
}

/// Parses `binomial:p` or `coeffs:a0,a1,...:p=k`.
impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("filter spec {s:?}"));
        if let Some(rest) = s.strip_prefix("binomial:") {
            let p: usize = rest.trim().parse().map_err(|_| bad())?;
            if !(1..=MAX_LENGTH).contains(&p) {
                return Err(bad());
            }
            return Ok(Filter::binomial(p));
        }
        if let Some(rest) = s.strip_prefix("coeffs:") {
            let (taps, order) = rest.rsplit_once(":p=").ok_or_else(bad)?;
            let coeffs = taps
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            let order: usize = order.trim().parse().map_err(|_| bad())?;
            return Filter::new(coeffs, order);
        }
        Err(bad())
    }
}

fn binomial_coeff(n: usize, k: usize) -> f64 {
    let mut c = 1u128;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

fn float_moment(coeffs: &[f64], i: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(l, a)| a * (l as f64).powi(i as i32))
        .sum()
}

/// Exact moment for integer taps; `None` on overflow.
fn integer_moment(taps: &[i64], i: usize) -> Option<i128> {
    let mut total: i128 = 0;
    for (l, a) in taps.iter().enumerate() {
        let pow = (l as i128).checked_pow(i as u32)?;
        total = total.checked_add((*a as i128).checked_mul(pow)?)?;
    }
    Some(total)
}

fn as_integers(coeffs: &[f64]) -> Option<Vec<i64>> {
    coeffs
        .iter()
        .map(|c| (c.fract() == 0.0 && c.abs() < 9.0e15).then_some(*c as i64))
        .collect()
}

/// Returns whether moment `i` is zero, exactly for integer taps and up to
/// `1e-12 * sum|a_l| L^i` otherwise.
fn moment_vanishes(coeffs: &[f64], ints: Option<&[i64]>, i: usize) -> (bool, f64) {
    if let Some(exact) = ints.and_then(|t| integer_moment(t, i)) {
        return (exact == 0, exact as f64);
    }
    let value = float_moment(coeffs, i);
    let scale_l = (coeffs.len() - 1) as f64;
    let scale: f64 = coeffs.iter().map(|a| a.abs()).sum::<f64>() * scale_l.powi(i as i32);
    (value.abs() <= FLOAT_TOL * scale, value)
}

fn check_moments(coeffs: &[f64], order: usize) -> Result<()> {
    let ints = as_integers(coeffs);
    for i in 0..=order {
        let (zero, value) = moment_vanishes(coeffs, ints.as_deref(), i);
        let expected_zero = i < order;
        if zero != expected_zero {
            return Err(Error::MomentConditionViolated {
                index: i,
                expected_zero,
                value,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent brute force over index pairs; signed differences.
    fn pair_sum_signed(a: &[f64], m: u32) -> f64 {
        let mut s = 0.0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in a.iter().enumerate() {
                s += x * y * (i as f64 - j as f64).powi(m as i32);
            }
        }
        s
    }

    #[test]
    fn first_and_second_differences_validate() {
        let d1 = Filter::new(vec![1.0, -1.0], 1).unwrap();
        assert_eq!(d1.moment(0), 0.0);
        assert_eq!(d1.moment(1), -1.0);
        Filter::new(vec![1.0, -2.0, 1.0], 2).unwrap();
    }

    #[test]
    fn first_difference_is_not_order_two() {
        match Filter::new(vec![1.0, -1.0], 2) {
            Err(Error::InvalidArgument(_)) => {}
            other => panic!("expected precondition failure, got {other:?}"),
        }
        // Same taps padded to L = 2 so that the order precondition holds.
        match Filter::new(vec![1.0, -1.0, 0.0], 2) {
            Err(Error::MomentConditionViolated {
                index: 1,
                expected_zero: true,
                value,
            }) => assert_eq!(value, -1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn order_too_low_reports_nonzero_expected() {
        match Filter::new(vec![1.0, -2.0, 1.0], 1) {
            Err(Error::MomentConditionViolated {
                index: 1,
                expected_zero: false,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(Filter::binomial(1).coeffs(), &[-1.0, 1.0]);
        assert_eq!(Filter::binomial(2).coeffs(), &[1.0, -2.0, 1.0]);
        assert_eq!(Filter::binomial(3).coeffs(), &[-1.0, 3.0, -3.0, 1.0]);
        for p in 1..=8 {
            let b = Filter::binomial(p);
            Filter::new(b.coeffs().to_vec(), p).unwrap();
            assert_eq!(b.binomial_order(), Some(p));
        }
    }

    #[test]
    fn double_moment_sum_brute_force_values() {
        let f = Filter::binomial(2);
        // Frozen from enumerating the 9 index pairs by hand.
        assert_eq!(f.double_moment_sum(0), 0.0);
        assert_eq!(f.double_moment_sum(1), -4.0);
        assert_eq!(f.double_moment_sum(2), 0.0);
        assert_eq!(f.double_moment_sum(3), 8.0);
        assert_eq!(f.double_moment_sum(4), 24.0);
    }

    #[test]
    fn double_moment_sum_at_twice_the_order() {
        // The pair sum at m = 2p is (-1)^p C(2p, p) (sum a_l l^p)^2.
        for p in 1..=3usize {
            let f = Filter::binomial(p);
            let mp = f.moment(p);
            let central = binomial_coeff(2 * p, p) * if p % 2 == 0 { 1.0 } else { -1.0 };
            let got = f.double_moment_sum(2 * p as u32);
            assert!((got - central * mp * mp).abs() <= 1e-12 * got.abs());
            assert_eq!(got, pair_sum_signed(f.coeffs(), 2 * p as u32));
        }
    }

    #[test]
    fn signed_pair_sums_vanish_below_twice_the_order() {
        for p in 1..=4usize {
            let f = Filter::binomial(p);
            for m in 0..2 * p as u32 {
                assert_eq!(pair_sum_signed(f.coeffs(), m), 0.0, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let f: Filter = "binomial:2".parse().unwrap();
        assert_eq!(f, Filter::binomial(2));
        assert_eq!(f.to_string(), "binomial:2");
        let g: Filter = "coeffs:1,-2,1:p=2".parse().unwrap();
        assert_eq!(g.coeffs(), &[1.0, -2.0, 1.0]);
        let h: Filter = "coeffs:1,-1:p=1".parse().unwrap();
        assert_eq!(h.to_string(), "coeffs:1,-1:p=1");
        assert!("coeffs:1,-1:p=2".parse::<Filter>().is_err());
        assert!("binomial:x".parse::<Filter>().is_err());
        assert!("wavelet:db4".parse::<Filter>().is_err());
    }

    #[test]
    fn dilation_keeps_order() {
        let d = Filter::binomial(2).dilated(2);
        assert_eq!(d.coeffs(), &[1.0, 0.0, -2.0, 0.0, 1.0]);
        Filter::new(d.coeffs().to_vec(), 2).unwrap();
    }

    #[test]
    fn rejects_overlong_filters() {
        let mut c = vec![0.0; MAX_LENGTH + 2];
        c[0] = 1.0;
        c[1] = -1.0;
        assert!(Filter::new(c, 1).is_err());
    }

    proptest! {
        #[test]
        fn validation_is_scale_invariant(
            taps in prop::collection::vec(-4i32..=4, 2..6),
            order in 1usize..4,
            c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3],
        ) {
            prop_assume!(order < taps.len());
            let a: Vec<f64> = taps.iter().map(|&t| t as f64).collect();
            let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
            prop_assert_eq!(Filter::new(a, order).is_ok(), Filter::new(scaled, order).is_ok());
        }

        #[test]
        fn binomial_scaling_stays_valid(p in 1usize..6, c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0]) {
            let scaled: Vec<f64> = Filter::binomial(p).coeffs().iter().map(|x| c * x).collect();
            prop_assert!(Filter::new(scaled, p).is_ok());
        }
    }
}
