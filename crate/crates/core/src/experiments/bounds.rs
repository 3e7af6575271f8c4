//! Sampled checks of the multiplier lemmas and the special-function bounds.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Check, ExperimentReport, Relation};
use crate::error::{domain, Error, Result};
use crate::multiplier::{check_derivative, check_large_arg, check_small_arg, m_eval};
use crate::specfun::{bessel_envelope, bessel_j, gautschi_bounds, log_gamma, stirling_log_bounds, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGrid {
    pub spacing: Spacing,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl SampleGrid {
    pub fn log(start: f64, end: f64, count: usize) -> Self {
        Self {
            spacing: Spacing::Log,
            start,
            end,
            count,
        }
    }

    pub fn linear(start: f64, end: f64, count: usize) -> Self {
        Self {
            spacing: Spacing::Linear,
            start,
            end,
            count,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count < 2 || !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return domain(format!("invalid sample grid {self:?}"));
        }
        let n = (self.count - 1) as f64;
        Ok(match self.spacing {
            Spacing::Linear => (0..self.count)
                .map(|i| self.start + (self.end - self.start) * i as f64 / n)
                .collect(),
            Spacing::Log => {
                if !(self.start > 0.0) {
                    return domain("a log grid needs a positive start");
                }
                let (a, b) = (self.start.ln(), self.end.ln());
                let mut v: Vec<f64> = (0..self.count)
                    .map(|i| (a + (b - a) * i as f64 / n).exp())
                    .collect();
                v[0] = self.start;
                v[self.count - 1] = self.end;
                v
            }
        })
    }
}

impl FromStr for SampleGrid {
    type Err = Error;

    /// `log:start:end:count` or `lin:start:end:count`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse sample grid {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let spacing = match *kind {
            "log" => Spacing::Log,
            "lin" | "linear" => Spacing::Linear,
            _ => return Err(bad()),
        };
        let g = Self {
            spacing,
            start: a.parse().map_err(|_| bad())?,
            end: b.parse().map_err(|_| bad())?,
            count: n.parse().map_err(|_| bad())?,
        };
        g.points()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiplierSuiteParams {
    pub dims: Vec<usize>,
    pub x_grid: SampleGrid,
    pub quadrature: QuadratureConfig,
}

impl Default for MultiplierSuiteParams {
    fn default() -> Self {
        Self {
            dims: vec![4, 6, 8, 12, 16],
            x_grid: SampleGrid::log(1e-3, 1e3, 200),
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// `m(0) = 1` and the small-argument, large-argument and derivative bounds
/// for `m` at every grid point inside each bound's domain.
pub fn multiplier_bound_suite(p: &MultiplierSuiteParams, seed: u64) -> Result<ExperimentReport> {
    if p.dims.is_empty() {
        return domain("the multiplier suite needs at least one dimension");
    }
    let xs = p.x_grid.points()?;
    let q = &p.quadrature;
    let mut report = ExperimentReport::new("verify-multiplier", seed, p)?;
    for &d in &p.dims {
        let m0 = m_eval(d, 0.0, q)?.value;
        report.push(d, 0, 0, "m_at_zero", m0);
        report.push(d, 0, 0, "m_at_zero_defect", (m0 - 1.0).abs());
        let root = (d as f64).sqrt();
        for (i, &x) in xs.iter().enumerate() {
            let i = i as u32;
            let (name, c) = if x <= root {
                ("small_arg_margin", check_small_arg(d, x, q)?)
            } else {
                ("large_arg_margin", check_large_arg(d, x, q)?)
            };
            report.push(d, xs.len(), i, name, c.margin);
            report.push(d, xs.len(), i, "derivative_margin", check_derivative(d, x, q)?.margin);
        }
    }
    report.bound_quantity("m_at_zero_defect", Relation::AtMost, 1e-8);
    for name in ["small_arg_margin", "large_arg_margin", "derivative_margin"] {
        if !report.values(name).is_empty() {
            report.bound_quantity(name, Relation::AtLeast, 0.0);
        }
    }
    report.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecfunSuiteParams {
    pub orders: Vec<f64>,
    pub t_grid: SampleGrid,
    pub gamma_grid: SampleGrid,
    pub gautschi_s: Vec<f64>,
    pub quadrature: QuadratureConfig,
}

impl Default for SpecfunSuiteParams {
    fn default() -> Self {
        Self {
            orders: vec![2.0, 3.0, 5.0, 10.0],
            t_grid: SampleGrid::linear(0.0, 100.0, 200),
            gamma_grid: SampleGrid::log(0.1, 100.0, 60),
            gautschi_s: vec![0.25, 0.5, 0.75],
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// `|J_ν| ≤ envelope`, `|J_ν| ≤ 1`, the Stirling bracket and Gautschi's
/// inequality on sample grids; margins are recorded as rows.
pub fn specfun_suite(p: &SpecfunSuiteParams, seed: u64) -> Result<ExperimentReport> {
    let ts = p.t_grid.points()?;
    let xs = p.gamma_grid.points()?;
    let mut report = ExperimentReport::new("verify-specfun", seed, p)?;
    let mut worst_env = f64::INFINITY;
    let mut worst_unit = f64::INFINITY;
    for &nu in &p.orders {
        for (i, &t) in ts.iter().enumerate() {
            let j = bessel_j(nu, t, &p.quadrature)?;
            let env = bessel_envelope(nu, t)?;
            report.push(0, ts.len(), i as u32, format!("envelope_margin[nu={nu}]"), env - j.abs());
            report.push(0, ts.len(), i as u32, format!("unit_margin[nu={nu}]"), 1.0 - j.abs());
            worst_env = worst_env.min(env - j.abs());
            worst_unit = worst_unit.min(1.0 - j.abs());
        }
    }
    if !p.orders.is_empty() {
        report.check(Check::new("|J_nu| <= envelope (smallest margin)", worst_env, Relation::AtLeast, 0.0));
        report.check(Check::new("|J_nu| <= 1 (smallest margin)", worst_unit, Relation::AtLeast, 0.0));
    }
    for (i, &x) in xs.iter().enumerate() {
        let lg = log_gamma(x)?;
        let (lo, hi) = stirling_log_bounds(x)?;
        report.push(0, xs.len(), i as u32, "stirling_lower_margin", lg - lo);
        report.push(0, xs.len(), i as u32, "stirling_upper_margin", hi - lg);
        for &s in &p.gautschi_s {
            let ratio = (log_gamma(x + 1.0)? - log_gamma(x + s)?).exp();
            let (glo, ghi) = gautschi_bounds(x, s)?;
            report.push(0, xs.len(), i as u32, format!("gautschi_lower_margin[s={s}]"), ratio - glo);
            report.push(0, xs.len(), i as u32, format!("gautschi_upper_margin[s={s}]"), ghi - ratio);
        }
    }
    let names: Vec<String> = {
        let mut v: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.quantity.starts_with("stirling") || r.quantity.starts_with("gautschi"))
            .map(|r| r.quantity.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    };
    for name in names {
        report.bound_quantity(&name, Relation::AtLeast, 0.0);
    }
    report.finish()
}
