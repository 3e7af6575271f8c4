//! Fourier symbols and their application to fields.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::grid::{forward_transform, inverse_transform, GridSpec, SpatialField, SpectralField};
use crate::multiplier::{m_sup, RadialProfile};
use crate::specfun::{sine_integral_fast, QuadratureConfig};

/// Axes are numbered from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSymbol {
    /// `-i ξ_j/|ξ|`.
    Riesz { axis: usize },
    /// `-i ξ_j/|ξ| · m(t|ξ|)`.
    TruncatedRiesz { axis: usize, t: f64 },
    /// `m(t|ξ|)`.
    FactorM { t: f64 },
    /// `e^{-t|ξ|/√d}`; `t = 0` is the identity.
    Poisson { t: f64 },
    /// `-i ξ_j/|ξ| · e^{-t|ξ|/√d}`.
    ConjugatePoisson { axis: usize, t: f64 },
    /// `e^{-2^{n-1}|ξ|/√d} - e^{-2^n|ξ|/√d}`.
    PoissonProjection { n: i32 },
    /// `e^{-4π² t ξ_j²}`.
    Heat1d { axis: usize, t: f64 },
    /// `-i sign(θ·ξ) (2/π)(π/2 - Si(2πε|θ·ξ|))`.
    DirectionalHilbertTrunc { theta: Vec<f64>, epsilon: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

fn non_negative(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("Poisson time must be ≥ 0, got {t}"));
    }
    Ok(())
}

fn axis_in(axis: usize, d: usize) -> Result<()> {
    if axis >= d {
        return domain(format!("axis {axis} out of range for dimension {d}"));
    }
    Ok(())
}

impl MultiplierSymbol {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Self::Riesz { axis } => axis_in(*axis, d),
            Self::TruncatedRiesz { axis, t } => {
                axis_in(*axis, d)?;
                positive("t", *t)
            }
            Self::ConjugatePoisson { axis, t } => {
                axis_in(*axis, d)?;
                non_negative(*t)
            }
            Self::FactorM { t } => positive("t", *t),
            Self::Poisson { t } => non_negative(*t),
            Self::PoissonProjection { n } => {
                if n.abs() > 1000 {
                    return domain(format!("projection index {n} is out of range"));
                }
                Ok(())
            }
            Self::Heat1d { axis, t } => {
                axis_in(*axis, d)?;
                positive("t", *t)
            }
            Self::DirectionalHilbertTrunc { theta, epsilon } => {
                if theta.len() != d {
                    return domain(format!("θ has {} components, expected {d}", theta.len()));
                }
                let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 {
                    return domain(format!("θ must be a unit vector, |θ| = {norm}"));
                }
                positive("ε", *epsilon)
            }
        }
    }

    /// Upper bound on `|σ|`.
    pub fn ceiling(&self, d: usize, q: &QuadratureConfig) -> Result<f64> {
        Ok(match self {
            Self::TruncatedRiesz { .. } | Self::FactorM { .. } => {
                if d >= 4 {
                    m_sup(d, q)?
                } else {
                    radial_sup(d, q)?
                }
            }
            _ => 1.0,
        })
    }

    fn needs_profile(&self) -> bool {
        matches!(self, Self::TruncatedRiesz { .. } | Self::FactorM { .. })
    }
}

fn radial_sup(d: usize, q: &QuadratureConfig) -> Result<f64> {
    let p = RadialProfile::get(d, q)?;
    let step = 1e-3;
    let n = (10.0 / step) as usize;
    Ok((1..=n).map(|i| p.m(i as f64 * step).abs()).fold(1.0, f64::max))
}

/// Evaluates symbols on the lattice `ξ = k/L` of one grid.
pub struct SymbolEvaluator {
    spec: GridSpec,
    profile: Option<Arc<RadialProfile>>,
}

impl SymbolEvaluator {
    pub fn new(spec: GridSpec, symbols: &[&MultiplierSymbol], q: &QuadratureConfig) -> Result<Self> {
        for s in symbols {
            s.validate(spec.dimension)?;
        }
        let profile = if symbols.iter().any(|s| s.needs_profile()) {
            Some(RadialProfile::get(spec.dimension, q)?)
        } else {
            None
        };
        Ok(Self { spec, profile })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// `m(x)`; requires the evaluator to have been built for an m-based symbol.
    pub fn m(&self, x: f64) -> f64 {
        self.profile
            .as_ref()
            .expect("evaluator was built without the radial profile")
            .m(x)
    }

    pub fn profile(&self) -> Option<&Arc<RadialProfile>> {
        self.profile.as_ref()
    }

    /// `σ(k/L)` for the wavevector `k`.
    pub fn eval(&self, s: &MultiplierSymbol, k: &[i64]) -> Complex64 {
        let l = self.spec.period;
        let root_d = (self.spec.dimension as f64).sqrt();
        let k2: i64 = k.iter().map(|v| v * v).sum();
        let rho = (k2 as f64).sqrt() / l;
        let riesz = |axis: usize| {
            if k2 == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -(k[axis] as f64) / (k2 as f64).sqrt())
            }
        };
        let real = |v: f64| Complex64::new(v, 0.0);
        match s {
            MultiplierSymbol::Riesz { axis } => riesz(*axis),
            MultiplierSymbol::TruncatedRiesz { axis, t } => riesz(*axis) * self.m(t * rho),
            MultiplierSymbol::FactorM { t } => real(self.m(t * rho)),
            MultiplierSymbol::Poisson { t } => real((-t * rho / root_d).exp()),
            MultiplierSymbol::ConjugatePoisson { axis, t } => {
                riesz(*axis) * (-t * rho / root_d).exp()
            }
            MultiplierSymbol::PoissonProjection { n } => {
                let a = rho / root_d;
                real((-(2f64.powi(n - 1)) * a).exp() - (-(2f64.powi(*n)) * a).exp())
            }
            MultiplierSymbol::Heat1d { axis, t } => {
                let xi = k[*axis] as f64 / l;
                real((-4.0 * std::f64::consts::PI.powi(2) * t * xi * xi).exp())
            }
            MultiplierSymbol::DirectionalHilbertTrunc { theta, epsilon } => {
                let dot: f64 = theta.iter().zip(k).map(|(a, &b)| a * b as f64).sum::<f64>() / l;
                directional_hilbert_symbol(dot, *epsilon)
            }
        }
    }

    /// Multiplies `c` by the symbol in place.
    pub fn apply_in_place(&self, c: &mut SpectralField, s: &MultiplierSymbol) {
        let spec = self.spec;
        exec::for_each_chunk_mut(&mut c.coefficients, 1024, |chunk, values| {
            let mut k = [0i64; 64];
            let k = &mut k[..spec.dimension];
            for (i, z) in values.iter_mut().enumerate() {
                spec.wavevector(chunk * 1024 + i, k);
                *z *= self.eval(s, k);
            }
        });
    }
}

/// Symbol of the truncated directional Hilbert transform at `θ·ξ = dot`.
pub(crate) fn directional_hilbert_symbol(dot: f64, epsilon: f64) -> Complex64 {
    if dot == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let u = 2.0 * std::f64::consts::PI * epsilon * dot.abs();
    let mag = 1.0 - std::f64::consts::FRAC_2_PI * sine_integral_fast(u);
    Complex64::new(0.0, -dot.signum() * mag)
}

/// Applies `s` to the coefficients of `f`.
pub fn apply_symbol_spectral(
    f: &SpectralField,
    s: &MultiplierSymbol,
    q: &QuadratureConfig,
) -> Result<SpectralField> {
    let ev = SymbolEvaluator::new(f.spec, &[s], q)?;
    let mut out = f.clone();
    ev.apply_in_place(&mut out, s);
    Ok(out)
}

/// Transforms, multiplies by the symbol at `ξ = k/L`, transforms back.
pub fn apply_symbol(
    f: &SpatialField,
    s: &MultiplierSymbol,
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    let c = forward_transform(f)?;
    inverse_transform(&apply_symbol_spectral(&c, s, q)?)
}

/// Applies the symbols in list order with a single transform pair.
pub fn apply_composition(
    f: &SpatialField,
    symbols: &[MultiplierSymbol],
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    let refs: Vec<&MultiplierSymbol> = symbols.iter().collect();
    let ev = SymbolEvaluator::new(f.spec, &refs, q)?;
    let mut c = forward_transform(f)?;
    for s in symbols {
        ev.apply_in_place(&mut c, s);
    }
    inverse_transform(&c)
}

/// Dyadic truncation parameters `2^n (1 + j 2^{-depth})`, `j < 2^depth`,
/// for `n_min ≤ n ≤ n_max`; the union over refinement levels `l ≤ depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationGrid {
    pub n_min: i32,
    pub n_max: i32,
    pub depth: u32,
}

impl Default for TruncationGrid {
    fn default() -> Self {
        Self {
            n_min: -8,
            n_max: 4,
            depth: 4,
        }
    }
}

impl TruncationGrid {
    pub fn new(n_min: i32, n_max: i32, depth: u32) -> Result<Self> {
        let g = Self {
            n_min,
            n_max,
            depth,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return domain(format!(
                "empty truncation grid: n_min {} > n_max {}",
                self.n_min, self.n_max
            ));
        }
        if self.depth > 12 || self.n_min < -60 || self.n_max > 60 {
            return Err(Error::Resource(format!("truncation grid {self:?} is too large")));
        }
        Ok(())
    }

    /// Values inside the block `[2^n, 2^{n+1})`, ascending.
    pub fn block(&self, n: i32) -> Vec<f64> {
        let m = 1u32 << self.depth;
        (0..m)
            .map(|j| 2f64.powi(n) * (1.0 + j as f64 / m as f64))
            .collect()
    }

    /// All values, ascending and distinct.
    pub fn values(&self) -> Vec<f64> {
        (self.n_min..=self.n_max).flat_map(|n| self.block(n)).collect()
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize * (1usize << self.depth)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Only the dyadic points `2^n`.
    pub fn dyadic(&self) -> Self {
        Self { depth: 0, ..*self }
    }
}

impl std::str::FromStr for TruncationGrid {
    type Err = Error;

    /// `n_min:n_max:depth`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return domain(format!("expected n_min:n_max:depth, got {s:?}"));
        }
        let parse = |p: &str| -> Result<i64> {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::Domain(format!("bad integer {p:?} in {s:?}")))
        };
        let (a, b, c) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if c < 0 || a.abs() > 60 || b.abs() > 60 || c > 12 {
            return domain(format!("truncation grid {s:?} out of range"));
        }
        Self::new(a as i32, b as i32, c as u32)
    }
}
