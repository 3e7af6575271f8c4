//! Special functions: log-gamma, Bessel functions of the first kind, the sine
//! integral, and the explicit analytic bounds used to control them.
//!
//! Bessel values come from integral representations evaluated by panel
//! quadrature. Two representations are used:
//!
//! * the Poisson integral
//!   `J_ν(t) = t^ν / (2^ν Γ(ν+½) √π) ∫_{-1}^{1} e^{its} (1-s²)^{ν-½} ds`,
//!   evaluated as `2∫_0^{π/2} cos(t cos θ) sin^{2ν} θ dθ` (s = cos θ removes
//!   the endpoint singularity);
//! * Schläfli's integral
//!   `J_ν(t) = (1/π)∫_0^π cos(νθ - t sin θ) dθ - (sin νπ/π)∫_0^∞ e^{-t sinh s - νs} ds`.
//!
//! The Poisson form carries the prefactor `(t/2)^ν/Γ(ν+1)` in front of an
//! integral of size ≤ the Beta normaliser; once that prefactor is large the
//! integral is a tiny difference of O(1) terms and the result loses all
//! digits. The Schläfli form has O(1) integrands and absolute accuracy near
//! machine precision for every `t`, so it takes over there.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::error::{domain, Error, Result};
use crate::quad::{self, integrate, Tolerance};

/// Tolerances and subdivision limits for the oscillatory integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Absolute error target of the final result.
    pub abs_tol: f64,
    /// Panels that adaptive refinement may add on top of the initial split.
    pub max_panels: usize,
    /// Allowed size of the analytically bounded tail of infinite integrals.
    pub tail_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_panels: 4000,
            tail_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.tail_tol > 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        if self.max_panels < 8 {
            return domain("max_panels must be at least 8");
        }
        Ok(())
    }
}

/// One evaluated inequality `|value| ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub argument: f64,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
    /// `bound - |value|`.
    pub margin: f64,
}

impl BoundCheck {
    pub fn new(argument: f64, value: f64, bound: f64) -> Self {
        let margin = bound - value.abs();
        Self {
            argument,
            value,
            bound,
            holds: value.abs() <= bound,
            margin,
        }
    }
}

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma(x))
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Bounds `√(2π) x^{x-½} e^{-x} ≤ Γ(x) ≤ √(2π) x^{x-½} e^{-x+1/(12x)}`, as logarithms.
pub fn stirling_log_bounds(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("stirling bounds require x > 0, got {x}"));
    }
    let lower = 0.5 * (2.0 * PI).ln() + (x - 0.5) * x.ln() - x;
    Ok((lower, lower + 1.0 / (12.0 * x)))
}

/// Stirling bracket of Γ(x).
pub fn stirling_bounds(x: f64) -> Result<(f64, f64)> {
    let (lo, hi) = stirling_log_bounds(x)?;
    if hi > f64::MAX.ln() {
        return Err(Error::Overflow(format!("Γ({x}) exceeds f64")));
    }
    Ok((lo.exp(), hi.exp()))
}

/// Gautschi bracket `x^{1-s} < Γ(x+1)/Γ(x+s) < (x+1)^{1-s}`.
pub fn gautschi_bounds(x: f64, s: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gautschi bounds require x > 0, got {x}"));
    }
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("gautschi bounds require 0 < s < 1, got {s}"));
    }
    Ok((x.powf(1.0 - s), (x + 1.0).powf(1.0 - s)))
}

/// Value with an estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

// Below this the Poisson integral is well conditioned (see module docs).
const POISSON_CONDITION_LIMIT: f64 = 1e3;
// Refinement budget for the inner Bessel quadratures, on top of the initial panels.
const INNER_PANELS: usize = 4000;

fn sin_power(theta: f64, two_nu: f64, integral_power: Option<i32>) -> f64 {
    let s = theta.sin();
    match integral_power {
        Some(0) => 1.0,
        Some(k) => s.powi(k),
        None => s.powf(two_nu),
    }
}

fn integral_exponent(two_nu: f64) -> Option<i32> {
    (two_nu.fract() == 0.0 && two_nu <= 512.0).then_some(two_nu as i32)
}

/// `∫_0^π cos(t cos θ) sin^{2ν}θ dθ` and its error.
fn poisson_integral(nu: f64, t: f64) -> quad::QuadResult {
    let two_nu = 2.0 * nu;
    let power = integral_exponent(two_nu);
    let f = |theta: f64| 2.0 * (t * theta.cos()).cos() * sin_power(theta, two_nu, power);
    let n = (t.ceil() as usize).max(8);
    let breaks = quad::uniform_breaks(0.0, FRAC_PI_2, n);
    integrate(
        &f,
        &breaks,
        Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_panels: n + INNER_PANELS,
        },
    )
}

/// J_ν(t) from Schläfli's integral (t > 0).
fn schlafli(nu: f64, t: f64) -> quad::QuadResult {
    let f = |theta: f64| (nu * theta - t * theta.sin()).cos() / PI;
    let n = ((2.0 * (t + nu)).ceil() as usize).max(8);
    let breaks = quad::uniform_breaks(0.0, PI, n);
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-15,
        max_panels: n + INNER_PANELS,
    };
    let mut r = integrate(&f, &breaks, tol);
    if nu.fract() != 0.0 {
        let weight = (nu * PI).sin() / PI;
        let g = |s: f64| (-t * s.sinh() - nu * s).exp();
        // Past `end` the integrand is below e^-40.
        let mut end = 1.0;
        while t * f64::sinh(end) + nu * end < 40.0 {
            end *= 2.0;
        }
        // Geometric panels resolve the e^{-t s} boundary layer at s = 0.
        let mut breaks = vec![0.0];
        let mut x = (1.0 / t).min(end / 2.0);
        while x < end {
            breaks.push(x);
            x *= 2.0;
        }
        breaks.push(end);
        let tail = integrate(&g, &breaks, tol);
        r.value -= weight * tail.value;
        r.error += weight.abs() * tail.error;
        r.abs += weight.abs() * tail.abs;
        r.converged &= tail.converged;
    }
    r
}

fn log_poisson_prefactor(nu: f64) -> f64 {
    // ln(2^ν Γ(ν+½) √π)
    nu * LN_2 + ln_gamma(nu + 0.5) + 0.5 * PI.ln()
}

/// `t^{-ν} J_ν(t)` with its absolute error; the scaling keeps the small-`t`
/// regime at full relative accuracy. Third field: quadrature converged.
pub(crate) fn bessel_j_scaled(nu: f64, t: f64) -> (f64, f64, bool) {
    if t == 0.0 {
        return ((-(nu * LN_2) - ln_gamma(nu + 1.0)).exp(), 0.0, true);
    }
    let log_condition = nu * (0.5 * t).ln() - ln_gamma(nu + 1.0);
    if log_condition <= POISSON_CONDITION_LIMIT.ln() {
        let r = poisson_integral(nu, t);
        let scale = (-log_poisson_prefactor(nu)).exp();
        (r.value * scale, r.error * scale, r.converged)
    } else {
        let r = schlafli(nu, t);
        let scale = (-nu * t.ln()).exp();
        (r.value * scale, r.error * scale, r.converged)
    }
}

/// J_ν(t) with its absolute error estimate.
pub fn bessel_j_estimate(nu: f64, t: f64) -> Result<Estimate> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return domain(format!("bessel_j requires ν ≥ 0, got {nu}"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("bessel_j requires t ≥ 0, got {t}"));
    }
    if t == 0.0 {
        let v = if nu == 0.0 { 1.0 } else { 0.0 };
        return Ok(Estimate { value: v, error: 0.0 });
    }
    let log_condition = nu * (0.5 * t).ln() - ln_gamma(nu + 1.0);
    let r = if log_condition <= POISSON_CONDITION_LIMIT.ln() {
        let r = poisson_integral(nu, t);
        let scale = (nu * t.ln() - log_poisson_prefactor(nu)).exp();
        Estimate {
            value: r.value * scale,
            error: r.error * scale,
        }
    } else {
        let r = schlafli(nu, t);
        Estimate {
            value: r.value,
            error: r.error,
        }
    };
    Ok(r)
}

/// Bessel function of the first kind J_ν(t), ν ≥ 0, t ≥ 0, to `q.abs_tol`.
pub fn bessel_j(nu: f64, t: f64, q: &QuadratureConfig) -> Result<f64> {
    let e = bessel_j_estimate(nu, t)?;
    if !(e.error <= q.abs_tol) || !e.value.is_finite() {
        return Err(Error::Accuracy {
            what: format!("J_{nu}({t})"),
            estimate: e.value,
            error: e.error,
            requested: q.abs_tol,
        });
    }
    Ok(e.value)
}

/// The explicit envelope
/// `2100 t^ν / (2^ν Γ(ν+½) √(νπ)) · (e^{-t/√ν} + e^{-ν/5})` dominating |J_ν(t)|.
pub fn bessel_envelope(nu: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return domain(format!("bessel_envelope requires ν > 0, got {nu}"));
    }
    if !(t >= 0.0) {
        return domain(format!("bessel_envelope requires t ≥ 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let log_front =
        2100f64.ln() + nu * t.ln() - nu * LN_2 - ln_gamma(nu + 0.5) - 0.5 * (nu * PI).ln();
    let decay = (-t / nu.sqrt()).exp() + (-nu / 5.0).exp();
    let v = (log_front + decay.ln()).exp();
    if !v.is_finite() {
        return Err(Error::Overflow(format!("envelope at ν={nu}, t={t}")));
    }
    Ok(v)
}

/// Si(u) = ∫_0^u sin(s)/s ds.
pub fn sine_integral(u: f64, q: &QuadratureConfig) -> Result<f64> {
    if !(u >= 0.0) || !u.is_finite() {
        return domain(format!("sine_integral requires u ≥ 0, got {u}"));
    }
    let r = if u >= SI_RANGE {
        sine_integral_asymptotic(u)
    } else {
        sine_integral_raw(u, q.max_panels)
    };
    if !(r.error <= q.abs_tol) {
        return Err(Error::Accuracy {
            what: format!("Si({u})"),
            estimate: r.value,
            error: r.error,
            requested: q.abs_tol,
        });
    }
    Ok(r.value)
}

pub(crate) fn sine_integral_raw(u: f64, extra_panels: usize) -> Estimate {
    if u == 0.0 {
        return Estimate {
            value: 0.0,
            error: 0.0,
        };
    }
    let sinc = |s: f64| if s == 0.0 { 1.0 } else { s.sin() / s };
    let n = ((u / FRAC_PI_2).ceil() as usize).max(1);
    let r = integrate(
        &sinc,
        &quad::uniform_breaks(0.0, u, n),
        Tolerance {
            abs: 1e-15,
            rel: 0.0,
            max_panels: n + extra_panels,
        },
    );
    Estimate {
        value: r.value,
        error: r.error,
    }
}

/// `Si(u) = π/2 − f(u) cos u − g(u) sin u` with the auxiliary functions
/// expanded to four terms; the error is bounded by the first omitted term.
fn sine_integral_asymptotic(u: f64) -> Estimate {
    let w = 1.0 / (u * u);
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0 / u, w);
    for k in 0..4 {
        f += tf;
        g += tg;
        let (a, b) = ((2 * k + 1) as f64, (2 * k + 2) as f64);
        tf *= -a * b * w;
        tg *= -b * (b + 1.0) * w;
    }
    Estimate {
        value: FRAC_PI_2 - f * u.cos() - g * u.sin(),
        error: tf.abs() + tg.abs() + 4.0 * f64::EPSILON,
    }
}

const SI_STEP: f64 = 1.0 / 16.0;
const SI_RANGE: f64 = 4096.0;

/// Si on `[0, SI_RANGE]` as a quintic Hermite table. `Si' = sinc` is
/// band-limited to `[-1, 1]`, so every derivative is bounded by 1 and the
/// interpolation error is below `h⁶/(64·720) ≈ 1.3e-12`.
fn si_table() -> &'static [f64] {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (SI_RANGE / SI_STEP) as usize;
        let sinc = |s: f64| if s == 0.0 { 1.0 } else { s.sin() / s };
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(n + 1);
        out.push(0.0);
        for i in 0..n {
            let a = i as f64 * SI_STEP;
            acc += quad::gk15(&sinc, a, a + SI_STEP).value;
            out.push(acc);
        }
        out
    })
}

/// Si(u) for many arguments: table lookup inside `[0, 4096]`, quadrature beyond.
pub(crate) fn sine_integral_fast(u: f64) -> f64 {
    if u >= SI_RANGE {
        return sine_integral_asymptotic(u).value;
    }
    let table = si_table();
    let i = ((u / SI_STEP) as usize).min(table.len() - 2);
    let a = i as f64 * SI_STEP;
    let b = a + SI_STEP;
    let sinc = |s: f64| if s == 0.0 { 1.0 } else { s.sin() / s };
    let dsinc = |s: f64| {
        if s < 1e-3 {
            -s / 3.0 + s.powi(3) / 30.0
        } else {
            (s * s.cos() - s.sin()) / (s * s)
        }
    };
    quad::hermite5(
        (u - a) / SI_STEP,
        SI_STEP,
        table[i],
        table[i + 1],
        sinc(a),
        sinc(b),
        dsinc(a),
        dsinc(b),
    )
}

/// Coefficients `a_k(ν)` of Hankel's expansion
/// `H^{(1)}_ν(r) ~ √(2/(πr)) e^{i(r - νπ/2 - π/4)} Σ_k i^k a_k(ν) r^{-k}`,
/// truncated once the terms at `r_min` fall below 1e-18 of the leading one.
/// Returns the coefficients and the size of the first omitted term at `r_min`.
fn hankel_coefficients(nu: f64, r_min: f64) -> (Vec<f64>, f64) {
    let mu = 4.0 * nu * nu;
    let mut coeffs = vec![1.0];
    let mut a = 1.0f64;
    let mut last_term = 1.0f64;
    for k in 1..400 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (8.0 * k as f64);
        if a == 0.0 {
            // Half-integer order: the expansion terminates.
            return (coeffs, 0.0);
        }
        let term = a.abs() / r_min.powi(k as i32);
        if term < 1e-18 || (term > last_term && k as f64 > nu) {
            return (coeffs, term);
        }
        coeffs.push(a);
        last_term = term;
    }
    (coeffs, last_term)
}

/// `∫_R^∞ r^{-b} e^{ir} dr` and a rigorous bound on the truncation of its
/// integration-by-parts series.
fn oscillatory_power_tail(b: f64, r: f64) -> (Complex64, f64) {
    let i = Complex64::i();
    let mut c = i;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    loop {
        let next = c * (-i) * ((b + n as f64) / r);
        if c.norm() < 1e-19 || next.norm() >= c.norm() || n > 200 {
            break;
        }
        sum += c;
        c = next;
        n += 1;
    }
    let scale = r.powf(-b);
    let phase = Complex64::from_polar(1.0, r);
    (phase * sum * scale, 2.0 * c.norm() * scale)
}

/// Point beyond which the asymptotic tail of `∫ r^{-a} J_ν` is used.
pub(crate) fn asymptotic_cutoff(nu: f64) -> f64 {
    (2.0 * nu * nu + 2.0 * nu).max(40.0)
}

/// `∫_R^∞ r^{-a} J_ν(r) dr` for `R ≥ asymptotic_cutoff(ν)` by term-wise
/// integration of Hankel's expansion.
pub(crate) fn bessel_power_tail_asymptotic(nu: f64, a: f64, r: f64) -> Estimate {
    let (coeffs, omitted) = hankel_coefficients(nu, r);
    let phase = Complex64::from_polar(1.0, -(nu * FRAC_PI_2 + 0.25 * PI));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut ik = Complex64::new(1.0, 0.0);
    for (k, &ak) in coeffs.iter().enumerate() {
        let (val, bound) = oscillatory_power_tail(a + 0.5 + k as f64, r);
        sum += ik * ak * val;
        err += ak.abs() * bound;
        ik *= Complex64::i();
    }
    let k = coeffs.len() as f64;
    let scale = (2.0 / PI).sqrt();
    // First omitted Hankel term, integrated against r^{-a-1/2}.
    let omitted_bound = 2.0 * omitted * r.powi(coeffs.len() as i32) * r.powf(0.5 - a - k)
        / (a - 0.5 + k);
    Estimate {
        value: scale * (phase * sum).re,
        error: scale * (err + omitted_bound),
    }
}

/// `∫_X^∞ r^{-a} J_ν(r) dr`, integrating panels of width ≤ π up to `cutoff`
/// and using the asymptotic tail beyond it. `abs_tol` bounds the panel part.
pub(crate) fn bessel_power_tail_with_cutoff(
    nu: f64,
    a: f64,
    x: f64,
    cutoff: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    let cutoff = cutoff.max(asymptotic_cutoff(nu));
    if x >= cutoff {
        return Ok(bessel_power_tail_asymptotic(nu, a, x));
    }
    let tail = bessel_power_tail_asymptotic(nu, a, cutoff);
    let failed = std::cell::Cell::new(false);
    let g = |r: f64| {
        let (v, _, ok) = bessel_j_scaled(nu, r);
        if !ok {
            failed.set(true);
        }
        if nu == a {
            v
        } else {
            r.powf(nu - a) * v
        }
    };
    let n = ((cutoff - x) / PI).ceil() as usize;
    let breaks = quad::uniform_breaks(x, cutoff, n.max(1));
    let r = integrate(
        &g,
        &breaks,
        Tolerance {
            abs: abs_tol,
            rel: 0.0,
            max_panels: breaks.len() + max_panels,
        },
    );
    let value = r.value + tail.value;
    let error = r.error + tail.error;
    if !r.converged || failed.get() {
        return Err(Error::Accuracy {
            what: format!("∫_{x}^∞ r^-{a} J_{nu}(r) dr"),
            estimate: value,
            error,
            requested: abs_tol,
        });
    }
    Ok(Estimate { value, error })
}

/// `∫_X^∞ r^{-a} J_ν(r) dr` for `a > -½` (convergent oscillatory tail).
pub fn bessel_power_tail(nu: f64, a: f64, x: f64, q: &QuadratureConfig) -> Result<Estimate> {
    if !(nu >= 0.0) || !(a > -0.5) || !(x >= 0.0) {
        return domain(format!("bessel_power_tail: ν={nu}, a={a}, x={x}"));
    }
    if x == 0.0 && a > nu + 1.0 - 1e-12 {
        return domain("integral diverges at the origin");
    }
    let est = bessel_power_tail_with_cutoff(nu, a, x, 0.0, q.abs_tol, q.max_panels)?;
    if est.error > q.abs_tol + q.tail_tol {
        return Err(Error::Accuracy {
            what: format!("∫_{x}^∞ r^-{a} J_{nu}(r) dr"),
            estimate: est.value,
            error: est.error,
            requested: q.abs_tol + q.tail_tol,
        });
    }
    Ok(est)
}
