//! Maximal functions, square functions and Poisson projections over finite
//! families of radial multipliers.
//!
//! Every family here has symbols `a(ξ) φ_i(|ξ|)` with a fixed angular factor
//! `a` and radial parts `φ_i`. For band-limited input the lattice radii form
//! a handful of shells `ρ_s`, and `op_i f(x) = Σ_s φ_i(ρ_s) g_s(x)` where
//! `g_s` is the inverse transform of `a c` restricted to shell `s`. The shell
//! fields are computed once, after which each parameter costs `S` multiply-adds
//! per point instead of a transform pair. When the shells outnumber the
//! parameters, or do not fit in memory, the operators fall back to one
//! transform pair per parameter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec;
use crate::grid::{forward_transform, inverse_transform, GridSpec, SpatialField, SpectralField};
use crate::operators::symbols::{MultiplierSymbol, SymbolEvaluator, TruncationGrid};
use crate::specfun::QuadratureConfig;

/// Bytes the shell fields may occupy.
pub const SHELL_MEMORY_BUDGET: usize = 1 << 30;

/// Coefficients below this fraction of the largest one are treated as zero
/// when grouping shells (round-off left by a transform pair).
const SHELL_THRESHOLD: f64 = 1e-13;

/// Operator families with a free truncation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    TruncatedRiesz { axis: usize },
    FactorM,
    Poisson,
    ConjugatePoisson { axis: usize },
}

impl Family {
    pub fn symbol(&self, t: f64) -> MultiplierSymbol {
        match *self {
            Self::TruncatedRiesz { axis } => MultiplierSymbol::TruncatedRiesz { axis, t },
            Self::FactorM => MultiplierSymbol::FactorM { t },
            Self::Poisson => MultiplierSymbol::Poisson { t },
            Self::ConjugatePoisson { axis } => MultiplierSymbol::ConjugatePoisson { axis, t },
        }
    }

    fn angular(&self) -> Angular {
        match *self {
            Self::TruncatedRiesz { axis } | Self::ConjugatePoisson { axis } => Angular::Riesz(axis),
            Self::FactorM | Self::Poisson => Angular::One,
        }
    }

    fn radial(&self, ev: &SymbolEvaluator, t: f64, rho: f64) -> f64 {
        match self {
            Self::TruncatedRiesz { .. } | Self::FactorM => ev.m(t * rho),
            Self::Poisson | Self::ConjugatePoisson { .. } => {
                (-t * rho / (ev.spec().dimension as f64).sqrt()).exp()
            }
        }
    }
}

/// Angular factor shared by a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Angular {
    One,
    /// `-i k_j/|k|`, zero at the origin.
    Riesz(usize),
}

impl Angular {
    pub fn eval(&self, k: &[i64], k2: i64) -> Complex64 {
        match *self {
            Self::One => Complex64::new(1.0, 0.0),
            Self::Riesz(axis) => {
                if k2 == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -(k[axis] as f64) / (k2 as f64).sqrt())
                }
            }
        }
    }
}

/// The shell fields `g_s` of one input, stored point-major.
pub struct ShellBank {
    spec: GridSpec,
    radii: Vec<f64>,
    values: Vec<Complex64>,
}

/// Distinct `|k|²` carrying nonzero coefficients, ascending.
pub fn occupied_shells(c: &SpectralField) -> Vec<u64> {
    let ksq = c.spec.k_squared();
    let peak = c.coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut shells: Vec<u64> = c
        .coefficients
        .iter()
        .zip(&ksq)
        .filter(|(z, _)| z.norm() > SHELL_THRESHOLD * peak)
        .map(|(_, &k)| k)
        .collect();
    shells.sort_unstable();
    shells.dedup();
    shells
}

impl ShellBank {
    /// Builds the shell fields of `a(k) c_k`; fails with a resource error
    /// when they would exceed [`SHELL_MEMORY_BUDGET`].
    pub fn new(c: &SpectralField, angular: Angular) -> Result<Self> {
        let spec = c.spec;
        let shells = occupied_shells(c);
        let s_count = shells.len();
        let bytes = s_count
            .checked_mul(spec.len())
            .and_then(|v| v.checked_mul(std::mem::size_of::<Complex64>()));
        if bytes.map_or(true, |b| b > SHELL_MEMORY_BUDGET) {
            return Err(Error::Resource(format!(
                "{s_count} shells on {} points exceed the shell memory budget",
                spec.len()
            )));
        }
        let ksq = spec.k_squared();
        let mut values = vec![Complex64::new(0.0, 0.0); s_count * spec.len()];
        let mut k = vec![0i64; spec.dimension];
        for (s, &shell) in shells.iter().enumerate() {
            let mut part = SpectralField::zeros(spec);
            for (i, z) in c.coefficients.iter().enumerate() {
                if ksq[i] == shell {
                    spec.wavevector(i, &mut k);
                    part.coefficients[i] = z * angular.eval(&k, shell as i64);
                }
            }
            let g = inverse_transform(&part)?;
            for (p, v) in g.samples.into_iter().enumerate() {
                values[p * s_count + s] = v;
            }
        }
        let radii = shells
            .iter()
            .map(|&k2| (k2 as f64).sqrt() / spec.period)
            .collect();
        Ok(Self {
            spec,
            radii,
            values,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn shells(&self) -> usize {
        self.radii.len()
    }

    /// `|ξ|` of each shell.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Evaluates `f(g_1(x), …, g_S(x))` at every grid point.
    pub fn pointwise<R, F>(&self, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[Complex64]) -> R + Sync + Send,
    {
        let s = self.shells();
        exec::map_range(self.spec.len(), |p| f(&self.values[p * s..(p + 1) * s]))
    }
}

/// `Σ_s φ_s v_s` for real weights.
#[inline]
pub fn combine(phi: &[f64], v: &[Complex64]) -> Complex64 {
    phi.iter()
        .zip(v)
        .fold(Complex64::new(0.0, 0.0), |acc, (a, z)| acc + z * *a)
}

/// How a family of outputs is reduced at each point.
#[derive(Debug, Clone, Copy)]
pub enum Reduce<'a> {
    /// `max_i |op_i f|`.
    Max,
    /// `Σ_i w_i |op_i f|²`.
    WeightedSquares(&'a [f64]),
}

/// Per-point reduction of `op_i f` with symbols `a(k) φ(i, |k|/L)`,
/// `i < count`. Uses the shell bank when it is cheaper and fits in memory.
pub fn reduce_radial<P>(
    f: &SpatialField,
    angular: Angular,
    radial: P,
    count: usize,
    reduce: Reduce<'_>,
    force_direct: bool,
) -> Result<Vec<f64>>
where
    P: Fn(usize, f64) -> f64 + Sync + Send,
{
    if count == 0 {
        return domain("empty parameter family");
    }
    if let Reduce::WeightedSquares(w) = reduce {
        if w.len() != count {
            return domain("one weight per parameter is required");
        }
    }
    let c = forward_transform(f)?;
    if !force_direct && occupied_shells(&c).len() <= count {
        match ShellBank::new(&c, angular) {
            Ok(bank) => return Ok(reduce_with_bank(&bank, &radial, count, reduce)),
            Err(Error::Resource(_)) => {}
            Err(e) => return Err(e),
        }
    }
    reduce_direct(&c, angular, &radial, count, reduce)
}

fn reduce_with_bank<P>(bank: &ShellBank, radial: &P, count: usize, reduce: Reduce<'_>) -> Vec<f64>
where
    P: Fn(usize, f64) -> f64 + Sync + Send,
{
    let s = bank.shells();
    if s == 0 {
        return vec![0.0; bank.spec().len()];
    }
    let phi: Vec<f64> = (0..count)
        .flat_map(|i| bank.radii().iter().map(move |&r| (i, r)))
        .map(|(i, r)| radial(i, r))
        .collect();
    match reduce {
        Reduce::Max => bank.pointwise(|v| {
            phi.chunks_exact(s)
                .map(|row| combine(row, v).norm_sqr())
                .fold(0.0, f64::max)
                .sqrt()
        }),
        Reduce::WeightedSquares(w) => bank.pointwise(|v| {
            phi.chunks_exact(s)
                .zip(w)
                .map(|(row, wi)| wi * combine(row, v).norm_sqr())
                .sum()
        }),
    }
}

fn reduce_direct<P>(
    c: &SpectralField,
    angular: Angular,
    radial: &P,
    count: usize,
    reduce: Reduce<'_>,
) -> Result<Vec<f64>>
where
    P: Fn(usize, f64) -> f64 + Sync + Send,
{
    let spec = c.spec;
    let ksq = spec.k_squared();
    let mut weighted = c.clone();
    let mut k = vec![0i64; spec.dimension];
    for (i, z) in weighted.coefficients.iter_mut().enumerate() {
        spec.wavevector(i, &mut k);
        *z *= angular.eval(&k, ksq[i] as i64);
    }
    let mut acc = vec![0.0f64; spec.len()];
    for i in 0..count {
        let mut part = weighted.clone();
        exec::for_each_chunk_mut(&mut part.coefficients, 4096, |chunk, values| {
            for (o, z) in values.iter_mut().enumerate() {
                let rho = (ksq[chunk * 4096 + o] as f64).sqrt() / spec.period;
                *z *= radial(i, rho);
            }
        });
        let g = inverse_transform(&part)?;
        match reduce {
            Reduce::Max => acc
                .iter_mut()
                .zip(&g.samples)
                .for_each(|(a, z)| *a = a.max(z.norm())),
            Reduce::WeightedSquares(w) => acc
                .iter_mut()
                .zip(&g.samples)
                .for_each(|(a, z)| *a += w[i] * z.norm_sqr()),
        }
    }
    Ok(acc)
}

fn family_evaluator(
    spec: GridSpec,
    family: Family,
    q: &QuadratureConfig,
) -> Result<SymbolEvaluator> {
    let probe = family.symbol(1.0);
    SymbolEvaluator::new(spec, &[&probe], q)
}

/// `sup_{t ∈ grid} |op_t f(x)|`.
pub fn maximal_over(
    f: &SpatialField,
    family: Family,
    grid: &TruncationGrid,
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    maximal_over_values(f, family, &grid_values(grid)?, q, false)
}

/// [`maximal_over`] with one transform pair per `t`; the reference path.
pub fn maximal_over_direct(
    f: &SpatialField,
    family: Family,
    grid: &TruncationGrid,
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    maximal_over_values(f, family, &grid_values(grid)?, q, true)
}

fn grid_values(grid: &TruncationGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    Ok(grid.values())
}

/// `sup_{t ∈ ts} |op_t f(x)|` for an explicit parameter list.
pub fn maximal_over_values(
    f: &SpatialField,
    family: Family,
    ts: &[f64],
    q: &QuadratureConfig,
    force_direct: bool,
) -> Result<SpatialField> {
    if ts.is_empty() {
        return domain("empty truncation set");
    }
    let ev = family_evaluator(f.spec, family, q)?;
    for &t in ts {
        family.symbol(t).validate(f.spec.dimension)?;
    }
    let out = reduce_radial(
        f,
        family.angular(),
        |i, rho| family.radial(&ev, ts[i], rho),
        ts.len(),
        Reduce::Max,
        force_direct,
    )?;
    Ok(SpatialField::from_real(f.spec, out))
}

/// `(Σ_j |R_j^t f|²)^{1/2}`.
pub fn vector_truncated_riesz(
    f: &SpatialField,
    t: f64,
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    let d = f.spec.dimension;
    let symbols: Vec<MultiplierSymbol> = (0..d)
        .map(|axis| MultiplierSymbol::TruncatedRiesz { axis, t })
        .collect();
    let refs: Vec<&MultiplierSymbol> = symbols.iter().collect();
    let ev = SymbolEvaluator::new(f.spec, &refs, q)?;
    let c = forward_transform(f)?;
    let mut acc = vec![0.0; f.spec.len()];
    for s in &symbols {
        let mut part = c.clone();
        ev.apply_in_place(&mut part, s);
        let g = inverse_transform(&part)?;
        acc.iter_mut()
            .zip(&g.samples)
            .for_each(|(a, z)| *a += z.norm_sqr());
    }
    Ok(SpatialField::from_real(
        f.spec,
        acc.into_iter().map(f64::sqrt).collect(),
    ))
}

/// `sup_{t ∈ grid} (Σ_j |R_j^t f|²)^{1/2}`.
///
/// With shell fields `g_{js}` of `R_j f`, `Σ_j |R_j^t f|² = φ_tᵀ G φ_t` where
/// `G_{ss'} = Re Σ_j g_{js} conj(g_{js'})` and `φ_t = (m(tρ_s))_s`; the Gram
/// matrices are accumulated one axis at a time.
pub fn vector_maximal(
    f: &SpatialField,
    grid: &TruncationGrid,
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    let ts = grid_values(grid)?;
    let spec = f.spec;
    let c = forward_transform(f)?;
    let shells = occupied_shells(&c).len();
    let gram_len = shells * (shells + 1) / 2;
    let fits = gram_len
        .checked_mul(spec.len() * 8)
        .is_some_and(|b| b <= SHELL_MEMORY_BUDGET);
    if shells > ts.len() || !fits {
        return vector_maximal_values_direct(f, &ts, q);
    }
    if shells == 0 {
        return Ok(SpatialField::zeros(spec));
    }
    let ev = family_evaluator(spec, Family::FactorM, q)?;
    let mut gram = vec![0.0; gram_len * spec.len()];
    let mut radii = Vec::new();
    for axis in 0..spec.dimension {
        let bank = ShellBank::new(&c, Angular::Riesz(axis))?;
        radii = bank.radii().to_vec();
        let s = bank.shells();
        exec::for_each_chunk_mut(&mut gram, gram_len * 1024, |chunk, block| {
            for (o, g) in block.chunks_exact_mut(gram_len).enumerate() {
                let p = chunk * 1024 + o;
                let v = &bank.values[p * s..(p + 1) * s];
                let mut idx = 0;
                for a in 0..s {
                    for b in a..s {
                        g[idx] += (v[a] * v[b].conj()).re;
                        idx += 1;
                    }
                }
            }
        });
    }
    let s = radii.len();
    let phi: Vec<f64> = ts
        .iter()
        .flat_map(|&t| radii.iter().map(move |&r| (t, r)))
        .map(|(t, r)| ev.m(t * r))
        .collect();
    let out = exec::map_range(spec.len(), |p| {
        let g = &gram[p * gram_len..(p + 1) * gram_len];
        let mut best = 0.0f64;
        for row in phi.chunks_exact(s) {
            let mut q = 0.0f64;
            let mut idx = 0;
            for a in 0..s {
                q += g[idx] * row[a] * row[a];
                idx += 1;
                for b in a + 1..s {
                    q += 2.0 * g[idx] * row[a] * row[b];
                    idx += 1;
                }
            }
            best = best.max(q);
        }
        best.max(0.0).sqrt()
    });
    Ok(SpatialField::from_real(spec, out))
}

/// [`vector_maximal`] by one vector evaluation per `t`; the reference path.
pub fn vector_maximal_direct(
    f: &SpatialField,
    grid: &TruncationGrid,
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    vector_maximal_values_direct(f, &grid_values(grid)?, q)
}

fn vector_maximal_values_direct(
    f: &SpatialField,
    ts: &[f64],
    q: &QuadratureConfig,
) -> Result<SpatialField> {
    let mut best = vec![0.0f64; f.spec.len()];
    for &t in ts {
        let v = vector_truncated_riesz(f, t, q)?;
        best.iter_mut()
            .zip(&v.samples)
            .for_each(|(b, z)| *b = b.max(z.re));
    }
    Ok(SpatialField::from_real(f.spec, best))
}

/// `n` logarithmically spaced nodes on `[t_min, t_max]`.
pub fn log_nodes(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || n < 2 {
        return domain("log_nodes needs 0 < t_min < t_max and n ≥ 2");
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

/// Trapezoid weights in `ln t` for `∫ t F(t) dt = ∫ t² F(t) d(ln t)`.
fn square_function_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    if nodes.len() < 2 {
        return domain("the square function needs at least two nodes");
    }
    if nodes[0] <= 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("nodes must be positive and increasing");
    }
    let u: Vec<f64> = nodes.iter().map(|t| t.ln()).collect();
    let n = nodes.len();
    Ok((0..n)
        .map(|i| {
            let left = if i > 0 { u[i] - u[i - 1] } else { 0.0 };
            let right = if i + 1 < n { u[i + 1] - u[i] } else { 0.0 };
            nodes[i] * nodes[i] * 0.5 * (left + right)
        })
        .collect())
}

/// `g(f)(x) ≈ (Σ_i w_i t_i |∂_t P_t f(x)|_{t=t_i}²)^{1/2}` with `∂_t P_t`
/// applied through its symbol `-(|ξ|/√d) e^{-t|ξ|/√d}`.
pub fn square_function(f: &SpatialField, t_nodes: &[f64]) -> Result<SpatialField> {
    let w = square_function_weights(t_nodes)?;
    let root_d = (f.spec.dimension as f64).sqrt();
    let out = reduce_radial(
        f,
        Angular::One,
        |i, rho| -(rho / root_d) * (-t_nodes[i] * rho / root_d).exp(),
        t_nodes.len(),
        Reduce::WeightedSquares(&w),
        false,
    )?;
    Ok(SpatialField::from_real(
        f.spec,
        out.into_iter().map(f64::sqrt).collect(),
    ))
}

fn projection_symbol(n: i32, a: f64) -> f64 {
    (-(2f64.powi(n - 1)) * a).exp() - (-(2f64.powi(n)) * a).exp()
}

/// `Σ_{n_min ≤ n ≤ n_max} S_n f`, summing the projection symbols term by term.
pub fn poisson_projection_sum(f: &SpatialField, n_min: i32, n_max: i32) -> Result<SpatialField> {
    if n_min > n_max {
        return domain(format!("empty projection range {n_min}..={n_max}"));
    }
    let spec = f.spec;
    let root_d = (spec.dimension as f64).sqrt();
    let ksq = spec.k_squared();
    let mut c = forward_transform(f)?;
    exec::for_each_chunk_mut(&mut c.coefficients, 4096, |chunk, values| {
        for (o, z) in values.iter_mut().enumerate() {
            let a = (ksq[chunk * 4096 + o] as f64).sqrt() / spec.period / root_d;
            let sigma: f64 = (n_min..=n_max).map(|n| projection_symbol(n, a)).sum();
            *z *= sigma;
        }
    });
    inverse_transform(&c)
}

/// `(Σ_{n_min ≤ n ≤ n_max} |S_n f(x)|²)^{1/2}`.
pub fn projection_square_sum(f: &SpatialField, n_min: i32, n_max: i32) -> Result<SpatialField> {
    if n_min > n_max {
        return domain(format!("empty projection range {n_min}..={n_max}"));
    }
    let root_d = (f.spec.dimension as f64).sqrt();
    let count = (n_max - n_min + 1) as usize;
    let ones = vec![1.0; count];
    let out = reduce_radial(
        f,
        Angular::One,
        |i, rho| projection_symbol(n_min + i as i32, rho / root_d),
        count,
        Reduce::WeightedSquares(&ones),
        false,
    )?;
    Ok(SpatialField::from_real(
        f.spec,
        out.into_iter().map(f64::sqrt).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random_band_limited;
    use crate::multiplier::RadialProfile;
    use crate::operators::symbols::apply_symbol;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn small_grid() -> TruncationGrid {
        TruncationGrid::new(-5, 1, 2).unwrap()
    }

    #[test]
    fn shell_path_matches_direct_path() {
        let s = GridSpec::new(3, 8, 1.0).unwrap();
        let f = random_band_limited(s, 2.5, 6).unwrap();
        for family in [
            Family::FactorM,
            Family::Poisson,
            Family::TruncatedRiesz { axis: 1 },
            Family::ConjugatePoisson { axis: 2 },
        ] {
            let a = maximal_over(&f, family, &small_grid(), &q()).unwrap();
            let b = maximal_over_direct(&f, family, &small_grid(), &q()).unwrap();
            assert!(a.relative_l2_error(&b).unwrap() < 1e-12, "{family:?}");
        }
        let a = vector_maximal(&f, &small_grid(), &q()).unwrap();
        let b = vector_maximal_direct(&f, &small_grid(), &q()).unwrap();
        assert!(a.relative_l2_error(&b).unwrap() < 1e-12);
    }

    #[test]
    fn single_mode_factor_m() {
        let s = GridSpec::new(4, 8, 1.0).unwrap();
        let k = [1, 1, 0, -1];
        let f = SpatialField::plane_wave(s, &k);
        let grid = small_grid();
        let out = maximal_over(&f, Family::FactorM, &grid, &q()).unwrap();
        let p = RadialProfile::get(4, &q()).unwrap();
        let rho = 3f64.sqrt();
        let want = grid
            .values()
            .iter()
            .map(|t| p.m(t * rho).abs())
            .fold(0.0, f64::max);
        assert!(out.samples.iter().all(|z| (z.re - want).abs() < 1e-12));
        let v = vector_maximal(&f, &grid, &q()).unwrap();
        assert!(v.samples.iter().all(|z| (z.re - want).abs() < 1e-12));
    }

    #[test]
    fn single_mode_poisson_peaks_at_smallest_t() {
        let s = GridSpec::new(2, 8, 1.0).unwrap();
        let f = SpatialField::plane_wave(s, &[2, 1]);
        let grid = small_grid();
        let out = maximal_over(&f, Family::Poisson, &grid, &q()).unwrap();
        let want = (-grid.values()[0] * 5f64.sqrt() / 2f64.sqrt()).exp();
        assert!(out.samples.iter().all(|z| (z.re - want).abs() < 1e-13));
    }

    #[test]
    fn single_t_grid_reduces_to_the_operator() {
        let s = GridSpec::new(3, 8, 1.0).unwrap();
        let f = random_band_limited(s, 2.5, 2).unwrap();
        let t = 0.25;
        let one = maximal_over_values(&f, Family::FactorM, &[t], &q(), false).unwrap();
        let direct = apply_symbol(&f, &MultiplierSymbol::FactorM { t }, &q()).unwrap();
        let abs = SpatialField::from_real(s, direct.samples.iter().map(|z| z.norm()).collect());
        assert!(one.relative_l2_error(&abs).unwrap() < 1e-12);
        let grid = TruncationGrid::new(-2, -2, 0).unwrap();
        let v = vector_maximal(&f, &grid, &q()).unwrap();
        let w = vector_truncated_riesz(&f, 0.25, &q()).unwrap();
        assert!(v.relative_l2_error(&w).unwrap() < 1e-12);
    }

    #[test]
    fn refinement_is_monotone_and_dominated_by_sum() {
        let s = GridSpec::new(2, 16, 1.0).unwrap();
        let f = random_band_limited(s, 5.0, 3).unwrap();
        let coarse = TruncationGrid::new(-5, 0, 1).unwrap();
        let fine = TruncationGrid::new(-6, 1, 3).unwrap();
        let fam = Family::TruncatedRiesz { axis: 0 };
        let a = maximal_over(&f, fam, &coarse, &q()).unwrap();
        let b = maximal_over(&f, fam, &fine, &q()).unwrap();
        assert!(a.samples.iter().zip(&b.samples).all(|(x, y)| x.re <= y.re + 1e-14));
        let mut sum = vec![0.0; s.len()];
        for t in coarse.values() {
            let g = apply_symbol(&f, &fam.symbol(t), &q()).unwrap();
            sum.iter_mut().zip(&g.samples).for_each(|(a, z)| *a += z.norm());
        }
        assert!(a.samples.iter().zip(&sum).all(|(x, y)| x.re <= y + 1e-12));
        let va = vector_maximal(&f, &coarse, &q()).unwrap();
        let vb = vector_maximal(&f, &fine, &q()).unwrap();
        assert!(va.samples.iter().zip(&vb.samples).all(|(x, y)| x.re <= y.re + 1e-14));
    }

    #[test]
    fn vector_riesz_basics() {
        let s = GridSpec::new(3, 8, 1.0).unwrap();
        let zero = SpatialField::zeros(s);
        assert_eq!(vector_truncated_riesz(&zero, 0.1, &q()).unwrap().sup_norm(), 0.0);
        let k = [1, 2, 0];
        let f = SpatialField::plane_wave(s, &k);
        let t = 0.2;
        let v = vector_truncated_riesz(&f, t, &q()).unwrap();
        let m = RadialProfile::get(3, &q()).unwrap().m(t * 5f64.sqrt());
        assert!(v.samples.iter().all(|z| (z.re - m.abs()).abs() < 1e-12));
        // Permuting coordinates of the input permutes the output.
        let g = random_band_limited(s, 2.5, 1).unwrap();
        let swap = |h: &SpatialField| {
            let mut out = h.clone();
            for i in 0..8 {
                for j in 0..8 {
                    for l in 0..8 {
                        out.samples[(i * 8 + j) * 8 + l] = h.samples[(j * 8 + i) * 8 + l];
                    }
                }
            }
            out
        };
        let a = vector_truncated_riesz(&swap(&g), t, &q()).unwrap();
        let b = swap(&vector_truncated_riesz(&g, t, &q()).unwrap());
        assert!(a.relative_l2_error(&b).unwrap() < 1e-12);
    }

    #[test]
    fn square_function_single_mode_tends_to_half() {
        let s = GridSpec::new(4, 8, 1.0).unwrap();
        let f = SpatialField::plane_wave(s, &[1, 0, 2, 0]);
        let nodes = log_nodes(1e-5, 1e3, 600).unwrap();
        let g = square_function(&f, &nodes).unwrap();
        assert!(g.samples.iter().all(|z| (z.re - 0.5).abs() < 1e-3));
        assert_eq!(
            square_function(&SpatialField::zeros(s), &nodes).unwrap().sup_norm(),
            0.0
        );
        assert!(square_function(&f, &[]).is_err());
    }

    #[test]
    fn projections_telescope() {
        let s = GridSpec::new(2, 16, 1.0).unwrap();
        let f = random_band_limited(s, 5.0, 4).unwrap();
        let one = poisson_projection_sum(&f, 3, 3).unwrap();
        let p = apply_symbol(&f, &MultiplierSymbol::Poisson { t: 4.0 }, &q()).unwrap();
        let p2 = apply_symbol(&f, &MultiplierSymbol::Poisson { t: 8.0 }, &q()).unwrap();
        assert!(one.relative_l2_error(&p.sub(&p2).unwrap()).unwrap() < 1e-12);
        // f has zero mean and frequencies in (0, 5], so the residual is at most
        // 1 - exp(-2^-21 · 5/√2) plus a negligible high-n term.
        let all = poisson_projection_sum(&f, -20, 20).unwrap();
        let bound = 1.0 - (-(2f64.powi(-21)) * 5.0 / 2f64.sqrt()).exp();
        assert!(all.relative_l2_error(&f).unwrap() < bound);
        assert!(poisson_projection_sum(&SpatialField::zeros(s), -2, 2)
            .unwrap()
            .sup_norm()
            == 0.0);
        let sq = projection_square_sum(&f, -20, 20).unwrap();
        assert!(sq.l2_norm() <= f.l2_norm() / 2f64.sqrt() * 1.05);
    }
}
