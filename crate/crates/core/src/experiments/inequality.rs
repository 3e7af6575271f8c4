//! The dyadic numerical inequality
//! `sup_{t∈[2^n,2^{n+1}]} |g(t) − g(2^n)| ≤ √2 Σ_l (Σ_m |Δ_{l,m} g|²)^{1/2}`.

use std::f64::consts::{PI, SQRT_2};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Check, ExperimentReport, Relation};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    /// Cycles per unit of `t`.
    pub frequency: f64,
    pub cos: f64,
    pub sin: f64,
}

/// A one-dimensional test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GSpec {
    /// `slope·t + intercept`.
    Linear { slope: f64, intercept: f64 },
    /// `Σ cos·cos(2πft) + sin·sin(2πft)`.
    Trig { terms: Vec<TrigTerm> },
    /// Linear interpolation of `(t, value)` knots, constant outside them.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl GSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Linear { slope, intercept } => {
                if !slope.is_finite() || !intercept.is_finite() {
                    return domain("linear coefficients must be finite");
                }
            }
            Self::Trig { terms } => {
                if terms.is_empty() {
                    return domain("a trigonometric polynomial needs at least one term");
                }
                if terms
                    .iter()
                    .any(|t| !(t.frequency.is_finite() && t.cos.is_finite() && t.sin.is_finite()))
                {
                    return domain("trigonometric coefficients must be finite");
                }
            }
            Self::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return domain("a piecewise linear function needs knots");
                }
                if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return domain("knots must be strictly increasing in t");
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Linear { slope, intercept } => slope * t + intercept,
            Self::Trig { terms } => terms
                .iter()
                .map(|x| {
                    let (s, c) = (2.0 * PI * x.frequency * t).sin_cos();
                    x.cos * c + x.sin * s
                })
                .sum(),
            Self::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k.0 <= t);
                if i == 0 {
                    knots[0].1
                } else if i == knots.len() {
                    knots[i - 1].1
                } else {
                    let (a, b) = (knots[i - 1], knots[i]);
                    a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
                }
            }
        }
    }

    /// A Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Linear { slope, .. } => slope.abs(),
            Self::Trig { terms } => terms
                .iter()
                .map(|x| 2.0 * PI * x.frequency.abs() * x.cos.hypot(x.sin))
                .sum(),
            Self::PiecewiseLinear { knots } => knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl FromStr for GSpec {
    type Err = Error;

    /// `linear:a:b` (a·t + b), `const:c`, `sin:f` (sin 2πft), `cos:f`, or
    /// `pwl:t0=v0,t1=v1,…`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse function spec {s:?}"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        let g = match parts.as_slice() {
            ["t"] => Self::Linear {
                slope: 1.0,
                intercept: 0.0,
            },
            ["linear", a, b] => Self::Linear {
                slope: num(a)?,
                intercept: num(b)?,
            },
            ["const", c] => Self::Linear {
                slope: 0.0,
                intercept: num(c)?,
            },
            ["sin", f] => Self::Trig {
                terms: vec![TrigTerm {
                    frequency: num(f)?,
                    cos: 0.0,
                    sin: 1.0,
                }],
            },
            ["cos", f] => Self::Trig {
                terms: vec![TrigTerm {
                    frequency: num(f)?,
                    cos: 1.0,
                    sin: 0.0,
                }],
            },
            ["pwl", list] => {
                let knots = list
                    .split(',')
                    .map(|kv| {
                        let (t, v) = kv.split_once('=').ok_or_else(bad)?;
                        Ok((num(t)?, num(v)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::PiecewiseLinear { knots }
            }
            _ => return Err(bad()),
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IneqParams {
    pub g: GSpec,
    pub n: i32,
    pub l_max: u32,
    /// Sample count for the supremum on the left.
    pub samples: usize,
}

impl Default for IneqParams {
    fn default() -> Self {
        Self {
            g: GSpec::Linear {
                slope: 1.0,
                intercept: 0.0,
            },
            n: 0,
            l_max: 10,
            samples: 1 << 16,
        }
    }
}

/// Both sides of the inequality for levels `0..=l_max`, with the tail beyond
/// `l_max` bounded by `√2·Lip·2^n·2^{-(l_max+1)/2}/(1 − 2^{-1/2})`.
pub fn numerical_inequality_check(p: &IneqParams, seed: u64) -> Result<ExperimentReport> {
    p.g.validate()?;
    if p.l_max > 30 {
        return domain(format!("l_max = {} exceeds 30", p.l_max));
    }
    if p.samples == 0 {
        return domain("at least one sample is required");
    }
    let mut report = ExperimentReport::new("ineq", seed, p)?;
    let start = 2f64.powi(p.n);
    let g0 = p.g.eval(start);
    let lhs = (0..=p.samples)
        .map(|i| (p.g.eval(start + start * i as f64 / p.samples as f64) - g0).abs())
        .fold(0.0, f64::max);
    report.push(1, p.samples, 0, "lhs", lhs);
    let mut rhs = 0.0;
    let mut previous = 0.0;
    let mut min_step = f64::INFINITY;
    for l in 0..=p.l_max {
        let count = 1usize << l;
        let h = start / count as f64;
        let level: f64 = (0..count)
            .map(|m| {
                let a = p.g.eval(start + h * m as f64);
                let b = p.g.eval(start + h * (m + 1) as f64);
                (b - a) * (b - a)
            })
            .sum::<f64>()
            .sqrt();
        rhs += SQRT_2 * level;
        report.push(1, p.samples, l, "rhs", rhs);
        min_step = min_step.min(rhs - previous);
        previous = rhs;
    }
    let decay = SQRT_2 * p.g.lipschitz() * start * 2f64.powf(-(p.l_max as f64 + 1.0) / 2.0)
        / (1.0 - std::f64::consts::FRAC_1_SQRT_2);
    report.push(1, p.samples, 0, "decay_estimate", decay);
    report.check(Check::new(
        format!("lhs <= rhs(L={}) + decay", p.l_max),
        lhs,
        Relation::AtMost,
        rhs + decay,
    ));
    report.check(Check::new(
        "rhs nondecreasing in L (smallest increment)",
        min_step,
        Relation::AtLeast,
        0.0,
    ));
    report.finish()
}
