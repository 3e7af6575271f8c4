//! The radial multiplier `m` of the factorization `R_j^t = M^t R_j`.
//!
//! `m(x) = C_d ∫_{2πx}^∞ r^{-d/2} J_{d/2}(r) dr` with
//! `C_d = 2^{d/2} Γ((d+1)/2)/√π`. [`m_eval`] integrates this directly;
//! [`RadialProfile`] tabulates the same tail integral once per dimension and
//! interpolates it, which is what the operators use on whole lattices.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::quad::{hermite5, integrate, Tolerance};
use crate::specfun::{
    asymptotic_cutoff, bessel_j_scaled, bessel_power_tail_asymptotic,
    bessel_power_tail_with_cutoff, ln_gamma, BoundCheck, QuadratureConfig,
};

/// One evaluation of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierEval {
    pub dimension: usize,
    pub argument: f64,
    pub value: f64,
    pub est_error: f64,
}

/// ln of `2^{d/2} Γ((d+1)/2)/√π`.
fn log_prefactor(d: usize) -> f64 {
    let d = d as f64;
    0.5 * d * LN_2 + ln_gamma(0.5 * (d + 1.0)) - 0.5 * PI.ln()
}

/// `c_d = Γ((d+1)/2)/π^{(d+1)/2}`, the Riesz kernel constant.
pub fn kernel_constant(d: usize) -> f64 {
    let a = 0.5 * (d as f64 + 1.0);
    (ln_gamma(a) - a * PI.ln()).exp()
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 4 {
        return domain(format!("the multiplier bounds need d ≥ 4, got d = {d}"));
    }
    Ok(())
}

fn check_argument(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("argument must be finite and ≥ 0, got {x}"));
    }
    Ok(())
}

/// `m(x)` by adaptive quadrature of the Bessel tail integral.
pub fn m_eval(d: usize, x: f64, q: &QuadratureConfig) -> Result<MultiplierEval> {
    check_dimension(d)?;
    check_argument(x)?;
    q.validate()?;
    m_direct(d, x, 0.0, q)
}

/// `m_eval` with the asymptotic tail starting no earlier than `cutoff`.
pub(crate) fn m_direct(
    d: usize,
    x: f64,
    cutoff: f64,
    q: &QuadratureConfig,
) -> Result<MultiplierEval> {
    let nu = 0.5 * d as f64;
    let scale = log_prefactor(d).exp();
    let tail =
        bessel_power_tail_with_cutoff(nu, nu, 2.0 * PI * x, cutoff, q.abs_tol / scale, q.max_panels)
            .map_err(|e| rescale_error(e, scale))?;
    let value = scale * tail.value;
    let est_error = scale * tail.error;
    if !(est_error <= q.abs_tol + q.tail_tol) {
        return Err(Error::Accuracy {
            what: format!("m({x}) in dimension {d}"),
            estimate: value,
            error: est_error,
            requested: q.abs_tol + q.tail_tol,
        });
    }
    Ok(MultiplierEval {
        dimension: d,
        argument: x,
        value,
        est_error,
    })
}

fn rescale_error(e: Error, scale: f64) -> Error {
    match e {
        Error::Accuracy {
            what,
            estimate,
            error,
            requested,
        } => Error::Accuracy {
            what,
            estimate: estimate * scale,
            error: error * scale,
            requested: requested * scale,
        },
        other => other,
    }
}

/// `m'(x) = -2√π Γ((d+1)/2) (πx)^{-d/2} J_{d/2}(2πx)`.
pub fn m_prime(d: usize, x: f64, q: &QuadratureConfig) -> Result<f64> {
    check_dimension(d)?;
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("m_prime requires x > 0, got {x}"));
    }
    let nu = 0.5 * d as f64;
    // (2πx)^ν / (πx)^ν = 2^ν, so the scaled Bessel value avoids the singular power.
    let (scaled, err, ok) = bessel_j_scaled(nu, 2.0 * PI * x);
    let factor = ((nu + 1.0) * LN_2 + 0.5 * PI.ln() + ln_gamma(nu + 0.5)).exp();
    if !ok || factor * err > q.abs_tol {
        return Err(Error::Accuracy {
            what: format!("m'({x}) in dimension {d}"),
            estimate: -factor * scaled,
            error: factor * err,
            requested: q.abs_tol,
        });
    }
    Ok(-factor * scaled)
}

/// Radial profile `h` of the Fourier transform of `c_d χ_{|x|>1} |x|^{-d-1}`,
/// evaluated as `c_d (2π)^{d/2+1} x ∫_{2πx}^∞ r^{-d/2-1} J_{d/2-1}(r) dr`.
pub fn h_eval(d: usize, x: f64, q: &QuadratureConfig) -> Result<f64> {
    check_dimension(d)?;
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("h_eval requires x > 0, got {x}"));
    }
    q.validate()?;
    let nu = 0.5 * d as f64 - 1.0;
    let scale = kernel_constant(d) * (2.0 * PI).powf(0.5 * d as f64 + 1.0) * x;
    let tail = bessel_power_tail_with_cutoff(
        nu,
        nu + 2.0,
        2.0 * PI * x,
        0.0,
        q.abs_tol / scale,
        q.max_panels,
    )
    .map_err(|e| rescale_error(e, scale))?;
    if !(scale * tail.error <= q.abs_tol + q.tail_tol) {
        return Err(Error::Accuracy {
            what: format!("h({x}) in dimension {d}"),
            estimate: scale * tail.value,
            error: scale * tail.error,
            requested: q.abs_tol + q.tail_tol,
        });
    }
    Ok(scale * tail.value)
}

/// `m(x) - 1` against `20 x/√d` on `0 ≤ x ≤ √d`.
pub fn check_small_arg(d: usize, x: f64, q: &QuadratureConfig) -> Result<BoundCheck> {
    check_dimension(d)?;
    let root = (d as f64).sqrt();
    if !(0.0..=root).contains(&x) {
        return domain(format!("check_small_arg needs 0 ≤ x ≤ √d, got {x}"));
    }
    // m(0) = 1 exactly; the quadrature value differs only by rounding.
    let value = if x == 0.0 {
        0.0
    } else {
        m_eval(d, x, q)?.value - 1.0
    };
    Ok(BoundCheck::new(x, value, 20.0 * x / root))
}

/// `m(x)` against `6·10⁴ √d / x` on `x ≥ √d`.
pub fn check_large_arg(d: usize, x: f64, q: &QuadratureConfig) -> Result<BoundCheck> {
    check_dimension(d)?;
    let root = (d as f64).sqrt();
    if !(x >= root) || !x.is_finite() {
        return domain(format!("check_large_arg needs x ≥ √d, got {x}"));
    }
    let value = m_eval(d, x, q)?.value;
    Ok(BoundCheck::new(x, value, 6e4 * root / x))
}

/// `x m'(x)` against `10⁴`.
pub fn check_derivative(d: usize, x: f64, q: &QuadratureConfig) -> Result<BoundCheck> {
    let value = x * m_prime(d, x, q)?;
    Ok(BoundCheck::new(x, value, 1e4))
}

/// `sup_{s ≥ 0} |m(s)|`: the maximum over a grid of step `0.01√d/4` on
/// `[0, d]`, combined with `|m(s)| ≤ 2C_d (2πs)^{1-d/2}/(d-2)` beyond `d`.
pub fn m_sup(d: usize, q: &QuadratureConfig) -> Result<f64> {
    m_sup_with_step(d, 0.0025 * (d as f64).sqrt(), q)
}

pub(crate) fn m_sup_with_step(d: usize, step: f64, q: &QuadratureConfig) -> Result<f64> {
    check_dimension(d)?;
    let profile = RadialProfile::get(d, q)?;
    let n = (d as f64 / step).ceil() as usize;
    let values = exec::map_range(n, |i| profile.m(((i + 1) as f64 * step).min(d as f64)).abs());
    // The grid starts at m(0) = 1.
    let grid_max = values.into_iter().fold(1.0, f64::max);
    let df = d as f64;
    let beyond = 2.0 * (log_prefactor(d) + (1.0 - 0.5 * df) * (2.0 * PI * df).ln()).exp()
        / (df - 2.0);
    Ok(grid_max.max(beyond))
}

/// Node spacing of the profile table, in units of `r = 2πx`.
const PROFILE_STEP: f64 = 0.125;

/// `G(r) = ∫_r^∞ s^{-ν} J_ν(s) ds` tabulated with its first two derivatives
/// and interpolated by quintic Hermite polynomials; `m(x) = C_d G(2πx)`.
///
/// Works for every `d ≥ 1`. `G^{(k)}` is bounded by `G'(0)` because
/// `s^{-ν}J_ν` is band-limited to `[-1, 1]`, so the interpolation error is
/// at most `h⁶|G'(0)|/(64·720)`.
#[derive(Debug)]
pub struct RadialProfile {
    dimension: usize,
    nu: f64,
    scale: f64,
    cutoff: f64,
    g0: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
    error: f64,
}

type ProfileKey = (usize, u64, u64, usize);

fn profile_cache() -> &'static Mutex<HashMap<ProfileKey, Arc<RadialProfile>>> {
    static CACHE: OnceLock<Mutex<HashMap<ProfileKey, Arc<RadialProfile>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl RadialProfile {
    /// The profile for dimension `d`, built on first use and shared afterwards.
    pub fn get(d: usize, q: &QuadratureConfig) -> Result<Arc<RadialProfile>> {
        let key = (d, q.abs_tol.to_bits(), q.tail_tol.to_bits(), q.max_panels);
        if let Some(p) = profile_cache().lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        // Built outside the lock so other dimensions are not serialised behind it.
        let built = Arc::new(Self::build(d, q)?);
        let mut cache = profile_cache().lock().unwrap();
        Ok(cache.entry(key).or_insert(built).clone())
    }

    pub fn build(d: usize, q: &QuadratureConfig) -> Result<Self> {
        if d == 0 {
            return domain("dimension must be ≥ 1");
        }
        q.validate()?;
        let nu = 0.5 * d as f64;
        let scale = log_prefactor(d).exp();
        let n = (asymptotic_cutoff(nu) / PROFILE_STEP).ceil() as usize;
        let cutoff = n as f64 * PROFILE_STEP;
        let seg_tol = 0.01 * q.abs_tol / (scale * n as f64);
        let integrand = |r: f64| bessel_j_scaled(nu, r).0;
        let segments = exec::map_range(n, |i| {
            let a = i as f64 * PROFILE_STEP;
            integrate(
                &integrand,
                &[a, a + PROFILE_STEP],
                Tolerance {
                    abs: seg_tol,
                    rel: 0.0,
                    max_panels: 64,
                },
            )
        });
        let tail = bessel_power_tail_asymptotic(nu, nu, cutoff);
        let mut g0 = vec![0.0; n + 1];
        g0[n] = tail.value;
        let mut err = tail.error;
        for i in (0..n).rev() {
            g0[i] = g0[i + 1] + segments[i].value;
            err += segments[i].error;
        }
        if segments.iter().any(|s| !s.converged) {
            return Err(Error::Accuracy {
                what: format!("radial profile in dimension {d}"),
                estimate: scale * g0[0],
                error: scale * err,
                requested: q.abs_tol,
            });
        }
        let derivs = exec::map_range(n + 1, |i| {
            let r = i as f64 * PROFILE_STEP;
            let (j0, _, _) = bessel_j_scaled(nu, r);
            let (j1, _, _) = bessel_j_scaled(nu + 1.0, r);
            (-j0, r * j1)
        });
        let (g1, g2) = derivs.into_iter().unzip();
        let peak = bessel_j_scaled(nu, 0.0).0;
        let interp = PROFILE_STEP.powi(6) * peak / (64.0 * 720.0);
        Ok(Self {
            dimension: d,
            nu,
            scale,
            cutoff,
            g0,
            g1,
            g2,
            error: scale * (err + interp),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Bound on the absolute error of [`RadialProfile::m`] inside the table.
    pub fn error_bound(&self) -> f64 {
        self.error
    }

    /// `m(x)` for `x ≥ 0`.
    pub fn m(&self, x: f64) -> f64 {
        let r = 2.0 * PI * x;
        if r >= self.cutoff {
            return self.scale * bessel_power_tail_asymptotic(self.nu, self.nu, r).value;
        }
        let h = PROFILE_STEP;
        let i = ((r / h) as usize).min(self.g0.len() - 2);
        let s = r / h - i as f64;
        let g = hermite5(
            s,
            h,
            self.g0[i],
            self.g0[i + 1],
            self.g1[i],
            self.g1[i + 1],
            self.g2[i],
            self.g2[i + 1],
        );
        self.scale * g
    }
}

/// `m` on many points, for lattices with few distinct radii.
pub fn m_many(d: usize, xs: &[f64], q: &QuadratureConfig) -> Result<Vec<f64>> {
    let profile = RadialProfile::get(d, q)?;
    Ok(exec::map_range(xs.len(), |i| profile.m(xs[i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn m_at_origin_is_one() {
        for d in [4, 8] {
            let e = m_eval(d, 0.0, &q()).unwrap();
            assert!((e.value - 1.0).abs() < 1e-10, "d={d}: {}", e.value);
            assert!(e.est_error <= q().abs_tol + q().tail_tol);
        }
        assert!(m_eval(3, 0.5, &q()).is_err());
    }

    #[test]
    fn m_at_ten_is_small() {
        let v = m_eval(4, 10.0, &q()).unwrap().value;
        assert!(v.abs() <= 6e4 * 2.0 / 10.0);
        assert!(v.abs() < 1e-2, "{v}");
    }

    #[test]
    fn m_matches_high_precision_values() {
        // 30-digit oscillatory quadrature of the defining integral.
        let cases = [
            (4, 0.05, 0.882_512_660_546_140_9),
            (4, 0.3, 0.358_449_146_858_670_7),
            (4, 1.0, -0.017_371_528_668_565_74),
            (4, 2.5, 0.001_774_955_692_940_105),
            (8, 0.5, 0.266_221_753_002_575_2),
            (16, 0.9, 0.151_485_448_518_895_05),
        ];
        for (d, x, want) in cases {
            let got = m_eval(d, x, &q()).unwrap().value;
            assert!((got - want).abs() < 1e-10, "d={d} x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn doubling_the_cutoff_is_consistent() {
        for &(d, x) in &[(4, 0.7), (8, 0.2), (12, 1.3)] {
            let a = m_direct(d, x, 0.0, &q()).unwrap().value;
            let r = asymptotic_cutoff(0.5 * d as f64);
            let b = m_direct(d, x, 2.0 * r, &q()).unwrap().value;
            assert!((a - b).abs() <= 2.0 * q().tail_tol + 2.0 * q().abs_tol, "{a} vs {b}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-4;
        let fd = (m_eval(4, 1.0 + h, &q()).unwrap().value
            - m_eval(4, 1.0 - h, &q()).unwrap().value)
            / (2.0 * h);
        let exact = m_prime(4, 1.0, &q()).unwrap();
        assert!((fd - exact).abs() < 1e-4, "{fd} vs {exact}");
        assert!(m_prime(4, 0.0, &q()).is_err());
    }

    #[test]
    fn derivative_vanishes_at_bessel_zero() {
        // First positive zero of J_2.
        let j21 = 5.135_622_301_840_683;
        let v = m_prime(4, j21 / (2.0 * PI), &q()).unwrap();
        assert!(v.abs() < 1e-12);
        let c = check_derivative(4, j21 / (2.0 * PI), &q()).unwrap();
        assert!(c.holds && (c.margin - 1e4).abs() < 1e-9);
    }

    #[test]
    fn derivative_bound_at_large_argument() {
        let c = check_derivative(6, 100.0, &q()).unwrap();
        assert!(c.holds && c.value.abs() <= 1e4);
        assert!(check_derivative(12, 144.0, &q()).unwrap().holds);
        assert!(check_derivative(4, 1.0, &q()).unwrap().holds);
    }

    #[test]
    fn h_derivative_is_minus_two_pi_m() {
        let dx = 1e-4;
        let hp = (h_eval(4, 1.0 + dx, &q()).unwrap() - h_eval(4, 1.0 - dx, &q()).unwrap())
            / (2.0 * dx);
        let m = m_eval(4, 1.0, &q()).unwrap().value;
        assert!((-hp / (2.0 * PI) - m).abs() < 1e-4, "{} vs {m}", -hp / (2.0 * PI));
        assert!(h_eval(4, 100.0, &q()).unwrap().abs() < h_eval(4, 1.0, &q()).unwrap().abs());
    }

    #[test]
    fn lemma_checks_examples() {
        let c = check_small_arg(4, 0.0, &q()).unwrap();
        assert!(c.holds && c.value == 0.0 && c.margin == 0.0);
        let c = check_small_arg(4, 1.0, &q()).unwrap();
        assert!(c.holds && c.bound == 10.0);
        let c = check_small_arg(16, 4.0, &q()).unwrap();
        assert!(c.holds && c.bound == 20.0);
        assert!(check_small_arg(4, 2.5, &q()).is_err());
        assert!(check_large_arg(4, 2.0, &q()).unwrap().holds);
        let c = check_large_arg(4, 1000.0, &q()).unwrap();
        assert!(c.holds && (c.bound - 120.0).abs() < 1e-12);
        assert!(check_large_arg(9, 3.0, &q()).unwrap().holds);
        assert!(check_small_arg(9, 3.0, &q()).unwrap().holds);
        assert!(check_large_arg(4, 1.0, &q()).is_err());
    }

    #[test]
    fn profile_matches_direct_quadrature() {
        for d in [4, 7, 12] {
            let p = RadialProfile::get(d, &q()).unwrap();
            for &x in &[0.0, 0.013, 0.21, 0.77, 1.9, 4.4, 30.0] {
                let direct = m_eval(d, x, &q()).unwrap().value;
                let tol = p.error_bound() + 2e-10;
                assert!((p.m(x) - direct).abs() < tol, "d={d} x={x}: {} vs {direct}", p.m(x));
            }
        }
    }

    #[test]
    fn profile_in_low_dimensions() {
        // d = 1: m(x) = (2/π)(π/2 - Si(2πx)) and d = 3: C ∫ r^{-3/2}J_{3/2}.
        let p = RadialProfile::get(1, &q()).unwrap();
        for &x in &[0.0, 0.1, 0.5, 2.0] {
            let si = crate::specfun::sine_integral(2.0 * PI * x, &q()).unwrap();
            let want = 1.0 - 2.0 / PI * si;
            assert!((p.m(x) - want).abs() < 1e-10, "x={x}: {} vs {want}", p.m(x));
        }
        for d in [2, 3] {
            let p = RadialProfile::get(d, &q()).unwrap();
            assert!((p.m(0.0) - 1.0).abs() < 1e-10);
            let nu = 0.5 * d as f64;
            let x = 0.37;
            let want = log_prefactor(d).exp()
                * crate::specfun::bessel_power_tail(nu, nu, 2.0 * PI * x, &q()).unwrap().value;
            assert!((p.m(x) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn sup_properties() {
        let s = m_sup(4, &q()).unwrap();
        assert!(s >= 1.0 && s <= 1.0 + 20.0 + 6e4);
        let fine = m_sup_with_step(4, 0.00025 * 2.0, &q()).unwrap();
        assert!((s - fine).abs() < 1e-3);
    }

    #[test]
    fn kernel_constant_values() {
        // c_1 = 1/π, c_3 = 1/π².
        assert!((kernel_constant(1) - 1.0 / PI).abs() < 1e-15);
        assert!((kernel_constant(3) - 1.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_fourier_transform_of_kernel() {
        use rand::{Rng, SeedableRng};
        use rand_distr::StandardNormal;
        // ĥ(ξ) = c_d S_{d-1} E[cos(2π θ·ξ / U)], r = 1/U, θ uniform on S^3.
        let d = 4;
        let x = 0.5;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 10_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u: f64 = 1.0 - rng.random::<f64>();
            acc += (2.0 * PI * x * g[0] / norm / u).cos();
        }
        let sphere = 2.0 * PI * PI;
        let mc = kernel_constant(d) * sphere * acc / n as f64;
        let h = h_eval(d, x, &q()).unwrap();
        assert!((mc - h).abs() < 1e-2, "{mc} vs {h}");
    }

    #[test]
    fn recurrence_holds_numerically() {
        let qq = q();
        for &nu in &[0.5, 2.0, 3.5] {
            for &t in &[0.7, 3.0, 11.0] {
                let dt = 1e-4;
                let f = |s: f64| bessel_j(nu, s, &qq).unwrap() / s.powf(nu);
                let lhs = (f(t + dt) - f(t - dt)) / (2.0 * dt) / t;
                let rhs = -bessel_j(nu + 1.0, t, &qq).unwrap() / t.powf(nu + 1.0);
                assert!((lhs - rhs).abs() < 1e-5);
            }
        }
    }
}
