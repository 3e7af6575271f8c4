//! Directional truncated Hilbert transforms and the method of rotations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::grid::{forward_transform, inverse_transform, SpatialField};
use crate::multiplier::kernel_constant;
use crate::operators::symbols::{apply_symbol, directional_hilbert_symbol, MultiplierSymbol};
use crate::quad::gauss_legendre;
use crate::specfun::{ln_gamma, QuadratureConfig};

/// Dimensions for which the method of rotations is implemented.
pub fn supported(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "directional Hilbert transforms are implemented for d = 2, 3 (got d = {d})"
        )))
    }
}

/// `H_θ^ε f(x) = (1/π) ∫_{|s|>ε} f(x − sθ) ds/s`, applied through its symbol
/// `−i sign(θ·ξ) (1 − (2/π) Si(2πε|θ·ξ|))`.
pub fn directional_hilbert_trunc(
    f: &SpatialField,
    theta: &[f64],
    epsilon: f64,
) -> Result<SpatialField> {
    supported(f.spec.dimension)?;
    let s = MultiplierSymbol::DirectionalHilbertTrunc {
        theta: theta.to_vec(),
        epsilon,
    };
    apply_symbol(f, &s, &QuadratureConfig::default())
}

/// Directions and weights of the sphere quadrature used by
/// [`rotation_reconstruct`]: the trapezoid rule in the angle for `d = 2`, and
/// the trapezoid rule in azimuth times Gauss–Legendre in `cos ψ` with
/// `n_angles / 2` nodes for `d = 3`.
///
/// Azimuthal nodes sit at `(i + 1/4)·2π/n`, so no node lies on a direction
/// orthogonal to a small lattice vector when `n` is a power of two.
pub fn sphere_quadrature(d: usize, n_angles: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    supported(d)?;
    if n_angles < 16 {
        return domain(format!("n_angles must be at least 16, got {n_angles}"));
    }
    let h = 2.0 * PI / n_angles as f64;
    let azimuth = |i: usize| ((i as f64 + 0.25) * h).sin_cos();
    if d == 2 {
        let dirs = (0..n_angles)
            .map(|i| {
                let (s, c) = azimuth(i);
                vec![c, s]
            })
            .collect();
        return Ok((dirs, vec![h; n_angles]));
    }
    let (z, wz) = gauss_legendre((n_angles / 2).max(1));
    let mut dirs = Vec::with_capacity(n_angles * z.len());
    let mut weights = Vec::with_capacity(n_angles * z.len());
    for (zk, wk) in z.iter().zip(&wz) {
        let r = (1.0 - zk * zk).sqrt();
        for i in 0..n_angles {
            let (s, c) = azimuth(i);
            dirs.push(vec![r * c, r * s, *zk]);
            weights.push(h * wk);
        }
    }
    Ok((dirs, weights))
}

/// `(c_d π/2) ∫_{S^{d−1}} θ_j H_θ^t f dθ` by [`sphere_quadrature`].
///
/// The directional symbols are summed per frequency, so the whole
/// reconstruction costs one transform pair.
pub fn rotation_reconstruct(
    f: &SpatialField,
    axis: usize,
    t: f64,
    n_angles: usize,
) -> Result<SpatialField> {
    let spec = f.spec;
    let d = spec.dimension;
    supported(d)?;
    if axis >= d {
        return domain(format!("axis {axis} out of range for d = {d}"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be positive and finite, got {t}"));
    }
    let (dirs, weights) = sphere_quadrature(d, n_angles)?;
    rotation_reconstruct_with(f, axis, t, &dirs, &weights)
}

/// [`rotation_reconstruct`] with a caller-supplied sphere quadrature.
pub fn rotation_reconstruct_with(
    f: &SpatialField,
    axis: usize,
    t: f64,
    dirs: &[Vec<f64>],
    weights: &[f64],
) -> Result<SpatialField> {
    let spec = f.spec;
    let d = spec.dimension;
    supported(d)?;
    if axis >= d {
        return domain(format!("axis {axis} out of range for d = {d}"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be positive and finite, got {t}"));
    }
    if dirs.len() != weights.len() || dirs.iter().any(|v| v.len() != d) {
        return domain("quadrature directions must have d components, one weight each");
    }
    let scale = kernel_constant(d) * PI / 2.0;
    let mut c = forward_transform(f)?;
    exec::for_each_chunk_mut(&mut c.coefficients, 256, |chunk, values| {
        let mut k = [0i64; 3];
        let k = &mut k[..d];
        for (o, z) in values.iter_mut().enumerate() {
            spec.wavevector(chunk * 256 + o, k);
            let xi: Vec<f64> = k.iter().map(|&v| v as f64 / spec.period).collect();
            let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut sigma = Complex64::new(0.0, 0.0);
            for (theta, w) in dirs.iter().zip(weights) {
                let mut dot: f64 = theta.iter().zip(&xi).map(|(a, b)| a * b).sum();
                // Directions orthogonal to ξ up to rounding sit on the jump.
                if dot.abs() <= 1e-12 * norm {
                    dot = 0.0;
                }
                sigma += directional_hilbert_symbol(dot, t) * (w * theta[axis]);
            }
            *z *= sigma * scale;
        }
    });
    inverse_transform(&c)
}

/// `S_{d−1} = 2π^{d/2}/Γ(d/2)`, the area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> Result<f64> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    let h = d as f64 / 2.0;
    Ok((2f64.ln() + h * PI.ln() - ln_gamma(h)).exp())
}

/// `∫_{S^{d−1}} |θ_1|^q dθ = S_{d−1} Γ(d/2) Γ((q+1)/2) / (√π Γ((d+q)/2))`.
pub fn sphere_moment(q: f64, d: usize) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return domain(format!("q must be positive and finite, got {q}"));
    }
    let h = d as f64 / 2.0;
    let log_ratio =
        ln_gamma(h) + ln_gamma((q + 1.0) / 2.0) - 0.5 * PI.ln() - ln_gamma(h + q / 2.0);
    Ok(sphere_area(d)? * log_ratio.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_band_limited, GridSpec};
    use crate::quad::{integrate, uniform_breaks, Tolerance};
    use approx::assert_relative_eq;

    #[test]
    fn sphere_moments() {
        for d in 2..=16 {
            let s = sphere_area(d).unwrap();
            assert_relative_eq!(sphere_moment(2.0, d).unwrap(), s / d as f64, max_relative = 1e-12);
            assert!(kernel_constant(d) * s <= (2.0 * d as f64 / PI).sqrt());
        }
        assert_relative_eq!(sphere_moment(1.0, 2).unwrap(), 4.0, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-13);
        assert!(sphere_moment(0.0, 3).is_err());
    }

    #[test]
    fn quadrature_integrates_moments() {
        for d in [2, 3] {
            let (dirs, w) = sphere_quadrature(d, 32).unwrap();
            let area: f64 = w.iter().sum();
            assert_relative_eq!(area, sphere_area(d).unwrap(), max_relative = 1e-12);
            let second: f64 = dirs.iter().zip(&w).map(|(t, w)| w * t[0] * t[0]).sum();
            assert_relative_eq!(second, sphere_moment(2.0, d).unwrap(), max_relative = 1e-12);
        }
        assert!(sphere_quadrature(2, 8).is_err());
        assert!(sphere_quadrature(4, 32).is_err());
    }

    fn single_mode_factor(u: f64, eps: f64) -> Complex64 {
        // (1/π) ∫_{|s|>ε} e^{−2πius} ds/s = −(2i/π) ∫_ε^∞ sin(2πus)/s ds.
        // Integrate to a zero of cos(2πus) so the remaining tail is O((uR)^{-2}).
        let a = 2.0 * PI * u.abs();
        let r = ((a * 2000.0 / a).ceil() + 0.5) * PI / a;
        let f = |s: f64| (a * s).sin() / s;
        let breaks = uniform_breaks(eps, r, ((r - eps) * a / PI).ceil() as usize + 1);
        let res = integrate(&f, &breaks, Tolerance { abs: 1e-12, rel: 0.0, max_panels: 100_000 });
        Complex64::new(0.0, -u.signum() * 2.0 / PI * res.value)
    }

    #[test]
    fn single_mode_matches_spatial_quadrature() {
        let s = GridSpec::new(2, 16, 1.0).unwrap();
        let theta = [0.6, 0.8];
        for (k, eps) in [([1i64, 2], 0.05), ([3, -1], 0.2), ([-2, -3], 0.01)] {
            let f = SpatialField::plane_wave(s, &k);
            let h = directional_hilbert_trunc(&f, &theta, eps).unwrap();
            let u = theta[0] * k[0] as f64 + theta[1] * k[1] as f64;
            let factor = single_mode_factor(u, eps);
            for (a, b) in h.samples.iter().zip(&f.samples) {
                assert!((a - b * factor).norm() < 1e-3);
            }
        }
    }

    #[test]
    fn limits_in_epsilon() {
        let s = GridSpec::new(3, 8, 1.0).unwrap();
        let k = [1i64, -2, 1];
        let f = SpatialField::plane_wave(s, &k);
        let theta = [0.0, 0.6, 0.8];
        let small = directional_hilbert_trunc(&f, &theta, 1e-12).unwrap();
        let u: f64 = theta.iter().zip(&k).map(|(a, &b)| a * b as f64).sum();
        let full = Complex64::new(0.0, -u.signum());
        for (a, b) in small.samples.iter().zip(&f.samples) {
            assert!((a - b * full).norm() < 1e-10);
        }
        let large = directional_hilbert_trunc(&f, &theta, 1e6).unwrap();
        assert!(large.sup_norm() < 1e-6);
        assert!(directional_hilbert_trunc(&f, &[1.0, 0.0, 0.0, 0.0], 0.1).is_err());
        let g = SpatialField::zeros(GridSpec::new(4, 4, 1.0).unwrap());
        assert!(matches!(
            directional_hilbert_trunc(&g, &[1.0, 0.0, 0.0, 0.0], 0.1),
            Err(Error::Unsupported(_))
        ));
    }

    fn spectral_error(f: &SpatialField, axis: usize, t: f64, n: usize) -> f64 {
        let want = apply_symbol(
            f,
            &MultiplierSymbol::TruncatedRiesz { axis, t },
            &QuadratureConfig::default(),
        )
        .unwrap();
        rotation_reconstruct(f, axis, t, n)
            .unwrap()
            .relative_l2_error(&want)
            .unwrap()
    }

    #[test]
    fn reconstruction_error_halves_in_two_dimensions() {
        let s = GridSpec::new(2, 32, 1.0).unwrap();
        let f = random_band_limited(s, 1.5, 5).unwrap();
        let errs: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| spectral_error(&f, 0, 0.1, n))
            .collect();
        for w in errs.windows(2) {
            let ratio = w[1] / w[0];
            assert!((0.45..0.55).contains(&ratio), "{errs:?}");
        }
        assert!(errs[3] < 2e-2, "{errs:?}");
        let g = random_band_limited(s, 10.0, 5).unwrap();
        let a = spectral_error(&g, 1, 0.05, 64);
        let b = spectral_error(&g, 1, 0.05, 128);
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn reconstruction_converges_in_three_dimensions() {
        let s = GridSpec::new(3, 8, 1.0).unwrap();
        let f = random_band_limited(s, 2.5, 8).unwrap();
        let a = spectral_error(&f, 2, 0.2, 32);
        let b = spectral_error(&f, 2, 0.2, 64);
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn axis_swap_commutes() {
        let s = GridSpec::new(2, 16, 1.0).unwrap();
        let f = random_band_limited(s, 5.0, 9).unwrap();
        let transpose = |h: &SpatialField| {
            let mut out = h.clone();
            for i in 0..16 {
                for j in 0..16 {
                    out.samples[i * 16 + j] = h.samples[j * 16 + i];
                }
            }
            out
        };
        let (dirs, w) = sphere_quadrature(2, 64).unwrap();
        let swapped: Vec<Vec<f64>> = dirs.iter().map(|v| vec![v[1], v[0]]).collect();
        let a = rotation_reconstruct_with(&transpose(&f), 1, 0.1, &swapped, &w).unwrap();
        let b = transpose(&rotation_reconstruct(&f, 0, 0.1, 64).unwrap());
        assert!(a.relative_l2_error(&b).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_unsupported_input() {
        let s = GridSpec::new(4, 4, 1.0).unwrap();
        let f = SpatialField::zeros(s);
        assert!(matches!(rotation_reconstruct(&f, 0, 0.1, 16), Err(Error::Unsupported(_))));
        let s = GridSpec::new(2, 8, 1.0).unwrap();
        let f = SpatialField::zeros(s);
        assert!(rotation_reconstruct(&f, 2, 0.1, 16).is_err());
        assert!(rotation_reconstruct(&f, 0, 0.1, 8).is_err());
    }
}
