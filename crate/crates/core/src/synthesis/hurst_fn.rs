use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a Hurst function `t -> H(t)` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HurstKind {
    Constant {
        hurst: f64,
    },
    /// `intercept + slope * t`
    Linear { intercept: f64, slope: f64 },
    /// `c0 + c1 * sin(pi t)`
    Periodic { c0: f64, c1: f64 },
    /// `c0 + c1 / (1 + exp(-rate (t - center)))`
    Logistic {
        c0: f64,
        c1: f64,
        rate: f64,
        center: f64,
    },
    /// Piecewise-linear through `(t, h)` knots sorted by `t`, covering `[0, 1]`.
    Tabulated { t: Vec<f64>, h: Vec<f64> },
}

/// A Hurst function with its declared Hölder exponent and range.
/// Serializes as its [`HurstKind`]; the other fields are derived.
#[derive(Clone, Debug, PartialEq)]
pub struct HurstFunction {
    kind: HurstKind,
    holder_eta: f64,
    range: (f64, f64),
}

impl Serialize for HurstFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.kind.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HurstFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let kind = HurstKind::deserialize(d)?;
        HurstFunction::new(kind).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinHurst {
    Linear,
    Periodic,
    Logistic,
}

impl FromStr for BuiltinHurst {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(BuiltinHurst::Linear),
            "periodic" => Ok(BuiltinHurst::Periodic),
            "logistic" => Ok(BuiltinHurst::Logistic),
            other => Err(Error::Parse(format!("unknown Hurst function {other:?}"))),
        }
    }
}

impl HurstFunction {
    /// Builds the function, computing its range on `[0, 1]`. All kinds here
    /// are Lipschitz, so `holder_eta = 1`.
    pub fn new(kind: HurstKind) -> Result<Self> {
        let range = match &kind {
            HurstKind::Constant { hurst } => (*hurst, *hurst),
            HurstKind::Linear { intercept, slope } => {
                let (a, b) = (*intercept, intercept + slope);
                (a.min(b), a.max(b))
            }
            HurstKind::Periodic { c0, c1 } => {
                // sin(pi t) covers [0, 1] on [0, 1].
                let (a, b) = (*c0, c0 + c1);
                (a.min(b), a.max(b))
            }
            HurstKind::Logistic { .. } => {
                // Monotone in t: extremes at the endpoints.
                let (a, b) = (eval_kind(&kind, 0.0), eval_kind(&kind, 1.0));
                (a.min(b), a.max(b))
            }
            HurstKind::Tabulated { t, h } => {
                if t.len() < 2 || t.len() != h.len() {
                    return Err(Error::InvalidArgument(
                        "tabulated Hurst function needs >= 2 matching knots".into(),
                    ));
                }
                if t.windows(2).any(|w| w[1] <= w[0]) || t[0] > 0.0 || t[t.len() - 1] < 1.0 {
                    return Err(Error::InvalidArgument(
                        "tabulated knots must be increasing and cover [0, 1]".into(),
                    ));
                }
                let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        };
        if !(range.0 > 0.0 && range.1 < 1.0) || range.0.is_nan() || range.1.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "Hurst range [{}, {}] not inside (0, 1)",
                range.0, range.1
            )));
        }
        Ok(HurstFunction {
            kind,
            holder_eta: 1.0,
            range,
        })
    }

    pub fn constant(hurst: f64) -> Result<Self> {
        Self::new(HurstKind::Constant { hurst })
    }

    pub fn builtin(which: BuiltinHurst) -> Self {
        let kind = match which {
            BuiltinHurst::Linear => HurstKind::Linear {
                intercept: 0.1,
                slope: 0.8,
            },
            BuiltinHurst::Periodic => HurstKind::Periodic { c0: 0.5, c1: 0.3 },
            BuiltinHurst::Logistic => HurstKind::Logistic {
                c0: 0.3,
                c1: 0.3,
                rate: 100.0,
                center: 0.7,
            },
        };
        Self::new(kind).expect("built-in Hurst functions are valid")
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_kind(&self.kind, t)
    }

    pub fn kind(&self) -> &HurstKind {
        &self.kind
    }

    pub fn holder_eta(&self) -> f64 {
        self.holder_eta
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn is_constant(&self) -> bool {
        self.range.0 == self.range.1
    }
}

fn eval_kind(kind: &HurstKind, t: f64) -> f64 {
    match kind {
        HurstKind::Constant { hurst } => *hurst,
        HurstKind::Linear { intercept, slope } => intercept + slope * t,
        HurstKind::Periodic { c0, c1 } => c0 + c1 * (PI * t).sin(),
        HurstKind::Logistic {
            c0,
            c1,
            rate,
            center,
        } => c0 + c1 / (1.0 + (-rate * (t - center)).exp()),
        HurstKind::Tabulated { t: ts, h } => {
            let i = ts.partition_point(|x| *x <= t).clamp(1, ts.len() - 1);
            let w = ((t - ts[i - 1]) / (ts[i] - ts[i - 1])).clamp(0.0, 1.0);
            h[i - 1] + w * (h[i] - h[i - 1])
        }
    }
}
