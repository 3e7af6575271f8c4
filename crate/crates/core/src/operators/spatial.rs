//! The truncated Riesz transform as a periodic convolution with its sampled kernel.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::grid::{forward_transform, inverse_transform, GridSpec, SpatialField};
use crate::multiplier::kernel_constant;

/// `K_j^t(x) = c_d x_j/|x|^{d+1}` on `|x| > t`, zero inside the ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub dimension: usize,
    pub axis: usize,
    pub truncation: f64,
    /// Images per axis on each side used to periodize the kernel.
    pub image_radius: usize,
    c_d: f64,
}

impl Kernel {
    pub fn new(dimension: usize, axis: usize, truncation: f64, image_radius: usize) -> Result<Self> {
        if axis >= dimension {
            return domain(format!("axis {axis} out of range for dimension {dimension}"));
        }
        if !(truncation > 0.0) || !truncation.is_finite() {
            return domain(format!("truncation must be positive, got {truncation}"));
        }
        Ok(Self {
            dimension,
            axis,
            truncation,
            image_radius,
            c_d: kernel_constant(dimension),
        })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 <= self.truncation * self.truncation {
            return 0.0;
        }
        self.c_d * x[self.axis] / r2.powf(0.5 * (self.dimension as f64 + 1.0))
    }

    /// `Σ_m K(x + mL)` over `m ∈ [-R, R]^d`.
    pub fn periodized(&self, x: &[f64], period: f64, shifted: &mut [f64]) -> f64 {
        let r = self.image_radius as i64;
        let side = (2 * r + 1) as usize;
        let count = side.pow(self.dimension as u32);
        let mut acc = 0.0;
        for idx in 0..count {
            let mut rest = idx;
            for a in 0..self.dimension {
                let m = (rest % side) as i64 - r;
                rest /= side;
                shifted[a] = x[a] + m as f64 * period;
            }
            acc += self.value(shifted);
        }
        acc
    }

    /// `c_d (L/r₀)^d` with `r₀ = (R + ½)L`: the kernel size at the edge of the
    /// image box times one period cell. A heuristic scale for the neglected
    /// images, reported rather than corrected.
    pub fn image_tail_estimate(&self) -> f64 {
        self.c_d * (self.image_radius as f64 + 0.5).powi(-(self.dimension as i32))
    }
}

/// `Σ_{m ∈ ℤ^d, m ≠ 0} |m|^{-s}` for `s > d`, from the theta-function
/// representation of the Epstein zeta function.
pub fn lattice_zeta(d: usize, s: f64) -> f64 {
    let df = d as f64;
    let theta_minus_one = |t: f64| {
        let mut th = 1.0;
        for n in 1..20 {
            let term = 2.0 * (-std::f64::consts::PI * (n * n) as f64 * t).exp();
            th += term;
            if term < 1e-18 {
                break;
            }
        }
        th.powi(d as i32) - 1.0
    };
    let integrand =
        |t: f64| (t.powf(0.5 * s - 1.0) + t.powf(0.5 * (df - s) - 1.0)) * theta_minus_one(t);
    let r = crate::quad::integrate(
        &integrand,
        &crate::quad::uniform_breaks(1.0, 41.0, 40),
        crate::quad::Tolerance {
            abs: 1e-16,
            rel: 1e-15,
            max_panels: 400,
        },
    );
    let lambda = r.value + 2.0 / (s - df) - 2.0 / s;
    lambda * std::f64::consts::PI.powf(0.5 * s) / crate::specfun::ln_gamma(0.5 * s).exp()
}

/// Coefficient `A` of the leading term `A y_j` of the images left out of a
/// cube of `R` images per side: `Σ_{|m|_∞ > R} K_j(y + mL) = A y_j + O(|y|³)`,
/// with `A = -(c_d / (d L^{d+1})) Σ_{|m|_∞ > R} |m|^{-(d+1)}`.
pub fn image_drift(d: usize, image_radius: usize, period: f64) -> f64 {
    let s = d as f64 + 1.0;
    let r = image_radius as i64;
    let side = (2 * r + 1) as usize;
    let mut inner = 0.0;
    for idx in 0..side.pow(d as u32) {
        let mut rest = idx;
        let mut m2 = 0i64;
        for _ in 0..d {
            let m = (rest % side) as i64 - r;
            rest /= side;
            m2 += m * m;
        }
        if m2 > 0 {
            inner += (m2 as f64).powf(-0.5 * s);
        }
    }
    let outer = lattice_zeta(d, s) - inner;
    -kernel_constant(d) / (d as f64 * period.powf(s)) * outer
}

/// `R_j^t f` by periodic convolution with the periodized kernel sampled on the
/// grid, executed through the transform pair. The images beyond
/// `image_radius` enter through their leading linear term [`image_drift`].
pub fn truncated_riesz_spatial(
    f: &SpatialField,
    axis: usize,
    t: f64,
    image_radius: usize,
) -> Result<SpatialField> {
    truncated_riesz_spatial_with(f, axis, t, image_radius, true)
}

/// As [`truncated_riesz_spatial`], optionally without the drift term.
pub fn truncated_riesz_spatial_with(
    f: &SpatialField,
    axis: usize,
    t: f64,
    image_radius: usize,
    drift_correction: bool,
) -> Result<SpatialField> {
    let spec = f.spec;
    if !(t < 0.5 * spec.period) {
        return domain(format!(
            "truncation {t} must be below half the period {}",
            spec.period
        ));
    }
    let kernel = Kernel::new(spec.dimension, axis, t, image_radius)?;
    let drift = if drift_correction {
        image_drift(spec.dimension, image_radius, spec.period)
    } else {
        0.0
    };
    let sampled = sample_kernel(&spec, &kernel, drift)?;
    let kc = forward_transform(&sampled)?;
    let mut c = forward_transform(f)?;
    // The unnormalised DFT of the sampled kernel times the cell volume is
    // L^{d/2} times its unitary coefficients.
    let scale = spec.period.powf(0.5 * spec.dimension as f64);
    c.coefficients
        .iter_mut()
        .zip(&kc.coefficients)
        .for_each(|(z, k)| *z *= k * scale);
    inverse_transform(&c)
}

fn sample_kernel(spec: &GridSpec, kernel: &Kernel, drift: f64) -> Result<SpatialField> {
    let n = spec.points_per_axis;
    let h = spec.period / n as f64;
    let d = spec.dimension;
    let images = (2 * kernel.image_radius + 1)
        .checked_pow(d as u32)
        .and_then(|c| c.checked_mul(spec.len()));
    if images.map_or(true, |w| w > 1 << 34) {
        return Err(Error::Resource(format!(
            "periodizing over {} images per axis in dimension {d} is too expensive",
            2 * kernel.image_radius + 1
        )));
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); spec.len()];
    exec::fill_indexed(&mut samples, 256, |i| {
        let mut x = [0.0; 64];
        let mut work = [0.0; 64];
        let mut nyquist = [0usize; 64];
        let mut n_nyquist = 0;
        let mut rest = i;
        for a in (0..d).rev() {
            let idx = rest % n;
            rest /= n;
            let signed = if idx < n / 2 { idx as f64 } else { idx as f64 - n as f64 };
            x[a] = signed * h;
            if idx == n / 2 {
                nyquist[n_nyquist] = a;
                n_nyquist += 1;
            }
        }
        // Points on the cell boundary have two representatives ±L/2 per axis;
        // averaging over them keeps the sampled kernel exactly odd.
        let mut acc = 0.0;
        for signs in 0..1usize << n_nyquist {
            for (b, &a) in nyquist[..n_nyquist].iter().enumerate() {
                x[a] = if signs >> b & 1 == 1 { 0.5 } else { -0.5 } * spec.period;
            }
            acc += kernel.periodized(&x[..d], spec.period, &mut work[..d])
                + drift * x[kernel.axis];
        }
        Complex64::new(acc / (1usize << n_nyquist) as f64, 0.0)
    });
    Ok(SpatialField {
        spec: *spec,
        samples,
    })
}
