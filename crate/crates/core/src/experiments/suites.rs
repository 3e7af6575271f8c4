//! Drivers that act on random band-limited fields.

use serde::{Deserialize, Serialize};

use super::{median, trial_seed, Check, ExperimentReport, Relation};
use crate::error::{domain, Result};
use crate::grid::{forward_transform, random_band_limited, GridSpec, SpatialField};
use crate::multiplier::RadialProfile;
use crate::operators::{
    apply_symbol, log_nodes, maximal_over, occupied_shells, poisson_projection_sum,
    projection_square_sum, rotation_reconstruct, sphere_area, sphere_moment, square_function,
    supported, vector_maximal, Angular, Family, MultiplierSymbol, ShellBank, TruncationGrid,
};
use crate::specfun::QuadratureConfig;
use crate::multiplier::kernel_constant;

/// Grid size used for `d` when none is given.
pub fn default_grid_size(d: usize) -> Option<usize> {
    match d {
        2 => Some(64),
        3 => Some(32),
        4 => Some(16),
        6 => Some(10),
        8 => Some(6),
        10 => Some(4),
        _ => None,
    }
}

fn norm_of(samples: &[f64], spec: &GridSpec) -> f64 {
    (samples.iter().map(|v| v * v).sum::<f64>() * spec.cell_volume()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorizationParams {
    pub d: usize,
    /// Several sizes give the discretization-convergence checks on matched seeds.
    pub grid_sizes: Vec<usize>,
    pub period: f64,
    pub t_list: Vec<f64>,
    pub band: f64,
    pub trials: u32,
    pub axis: usize,
    pub image_radius: usize,
    pub max_residual: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for FactorizationParams {
    fn default() -> Self {
        Self {
            d: 4,
            grid_sizes: vec![16],
            period: 1.0,
            t_list: vec![0.15],
            band: 3.0,
            trials: 4,
            axis: 0,
            image_radius: 1,
            max_residual: 0.1,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// `‖R_j^t f (spatial kernel) − M^t R_j f (spectral)‖₂ / ‖f‖₂` per trial and `t`.
pub fn factorization_residual(p: &FactorizationParams, seed: u64) -> Result<ExperimentReport> {
    if p.grid_sizes.is_empty() || p.t_list.is_empty() || p.trials == 0 {
        return domain("factorization needs grid sizes, truncations and trials");
    }
    let mut report = ExperimentReport::new("factorization", seed, p)?;
    let riesz = MultiplierSymbol::Riesz { axis: p.axis };
    for &n in &p.grid_sizes {
        let spec = GridSpec::new(p.d, n, p.period)?;
        for trial in 0..p.trials {
            let f = random_band_limited(spec, p.band, trial_seed(seed, trial))?;
            let norm = f.l2_norm();
            let rf = apply_symbol(&f, &riesz, &p.quadrature)?;
            for &t in &p.t_list {
                let spectral = apply_symbol(&rf, &MultiplierSymbol::FactorM { t }, &p.quadrature)?;
                let spatial =
                    crate::operators::truncated_riesz_spatial(&f, p.axis, t, p.image_radius)?;
                let diff = spatial.sub(&spectral)?.l2_norm();
                report.push(p.d, n, trial, format!("residual[t={t}]"), diff / norm);
                report.push(
                    p.d,
                    n,
                    trial,
                    format!("relative_residual[t={t}]"),
                    diff / spectral.l2_norm(),
                );
            }
        }
    }
    for &t in &p.t_list {
        report.bound_quantity(&format!("residual[t={t}]"), Relation::AtMost, p.max_residual);
    }
    for pair in p.grid_sizes.windows(2) {
        for trial in 0..p.trials {
            for &t in &p.t_list {
                let q = format!("residual[t={t}]");
                let coarse = report.value(p.d, pair[0], trial, &q).unwrap_or(f64::NAN);
                let fine = report.value(p.d, pair[1], trial, &q).unwrap_or(f64::NAN);
                report.check(Check::new(
                    format!("{q} N={} below N={} (trial {trial})", pair[1], pair[0]),
                    fine,
                    Relation::Below,
                    coarse,
                ));
            }
        }
    }
    report.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimGrid {
    pub d: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    pub configs: Vec<DimGrid>,
    pub period: f64,
    pub grid: TruncationGrid,
    pub band: f64,
    pub trials: u32,
    pub ratio_ceiling: f64,
    /// Allowed `max/min − 1` of the per-dimension medians of `r1`.
    pub max_median_spread: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            configs: [4, 6, 8, 10]
                .iter()
                .map(|&d| DimGrid {
                    d,
                    n: default_grid_size(d).unwrap_or(4),
                })
                .collect(),
            period: 1.0,
            grid: TruncationGrid::default(),
            band: 1.5,
            trials: 8,
            ratio_ceiling: 10.0,
            max_median_spread: 0.25,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// The maximal-function ratios `r1 … r4` across dimensions.
///
/// * `r1 = ‖M^* f‖/‖f‖`
/// * `r2 = ‖R_1^* f‖/‖R_1 f‖`
/// * `r3 = ‖(Σ_j |R_j^*|²)^{1/2} f‖/‖f‖`, the sup taken outside the sum
/// * `r4 = ‖sup_t |Q_t^1 f|‖/‖R_1 f‖` for the conjugate Poisson family
pub fn norm_ratio_sweep(p: &SweepParams, seed: u64) -> Result<ExperimentReport> {
    if p.configs.is_empty() || p.trials == 0 {
        return domain("the sweep needs at least one dimension and one trial");
    }
    p.grid.validate()?;
    let mut report = ExperimentReport::new("norm-sweep", seed, p)?;
    let q = &p.quadrature;
    let mut medians = Vec::new();
    for cfg in &p.configs {
        let spec = GridSpec::new(cfg.d, cfg.n, p.period)?;
        let mut r1s = Vec::new();
        for trial in 0..p.trials {
            let f = random_band_limited(spec, p.band, trial_seed(seed, trial))?;
            let norm = f.l2_norm();
            let mut riesz_sq = 0.0;
            let mut r1_norm = 0.0;
            for axis in 0..cfg.d {
                let r = apply_symbol(&f, &MultiplierSymbol::Riesz { axis }, q)?.l2_norm();
                riesz_sq += r * r;
                if axis == 0 {
                    r1_norm = r;
                }
            }
            let m = maximal_over(&f, Family::FactorM, &p.grid, q)?.l2_norm();
            let r = maximal_over(&f, Family::TruncatedRiesz { axis: 0 }, &p.grid, q)?.l2_norm();
            let v = vector_maximal(&f, &p.grid, q)?.l2_norm();
            let c = maximal_over(&f, Family::ConjugatePoisson { axis: 0 }, &p.grid, q)?.l2_norm();
            let (d, n) = (cfg.d, cfg.n);
            report.push(d, n, trial, "r1", m / norm);
            report.push(d, n, trial, "r2", r / r1_norm);
            report.push(d, n, trial, "r3", v / norm);
            report.push(d, n, trial, "r4", c / r1_norm);
            report.push(d, n, trial, "riesz1_ratio", r1_norm / norm);
            report.push(d, n, trial, "isometry_defect", (riesz_sq - norm * norm).abs() / (norm * norm));
            r1s.push(m / norm);
        }
        medians.push(median(&r1s));
    }
    for q in ["r1", "r2", "r3", "r4"] {
        report.bound_quantity(q, Relation::AtMost, p.ratio_ceiling);
    }
    report.bound_quantity("riesz1_ratio", Relation::AtMost, 1.0 + 1e-12);
    report.bound_quantity("isometry_defect", Relation::AtMost, 1e-12);
    let lo = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = medians.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    report.check(Check::new(
        "spread of per-dimension median r1 (max/min - 1)",
        hi / lo - 1.0,
        Relation::Below,
        p.max_median_spread,
    ));
    report.finish()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecompositionParams {
    pub d: usize,
    pub n: usize,
    pub period: f64,
    pub grid: TruncationGrid,
    pub band: f64,
    pub trials: u32,
    pub a_bound: f64,
    pub b_bound: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        Self {
            d: 4,
            n: 16,
            period: 1.0,
            grid: TruncationGrid::default(),
            band: 1.5,
            trials: 8,
            a_bound: 1.3e5,
            b_bound: 1.7e8,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// Relative slack allowed in `r1 ≤ a + b`, which holds pointwise before the
/// norms are rounded.
pub const SPLIT_SLACK: f64 = 1e-12;

/// Splits `M^*` into the dyadic part `a`, the local variation `b`, and the
/// dyadic distance `c` to the Poisson semigroup.
///
/// * `a = ‖sup_n |M^{2^n} f|‖/‖f‖`
/// * `b = ‖(Σ_n sup_{t ∈ block n} |M^t f − M^{2^n} f|²)^{1/2}‖/‖f‖`
/// * `c = ‖sup_n |M^{2^n} f − P_{2^n} f|‖/‖f‖`, bounded by
///   `(Σ_n ‖M^{2^n} f − P_{2^n} f‖²)^{1/2}/‖f‖` computed from the coefficients
pub fn decomposition_diagnostics(p: &DecompositionParams, seed: u64) -> Result<ExperimentReport> {
    if p.trials == 0 {
        return domain("decomposition needs at least one trial");
    }
    p.grid.validate()?;
    let mut report = ExperimentReport::new("decomposition", seed, p)?;
    let spec = GridSpec::new(p.d, p.n, p.period)?;
    let profile = RadialProfile::get(p.d, &p.quadrature)?;
    let root_d = (p.d as f64).sqrt();
    let blocks: Vec<(f64, Vec<f64>)> = (p.grid.n_min..=p.grid.n_max)
        .map(|n| (2f64.powi(n), p.grid.block(n)))
        .collect();
    for trial in 0..p.trials {
        let f = random_band_limited(spec, p.band, trial_seed(seed, trial))?;
        let norm = f.l2_norm();
        let c = forward_transform(&f)?;
        let bank = ShellBank::new(&c, Angular::One)?;
        let radii = bank.radii().to_vec();
        let row = |g: &dyn Fn(f64) -> f64| radii.iter().map(|&r| g(r)).collect::<Vec<f64>>();
        // Per block: m at every block point (the first is 2^n), then e^{-2^n ρ/√d}.
        let tables: Vec<(Vec<Vec<f64>>, Vec<f64>)> = blocks
            .iter()
            .map(|(s, ts)| {
                let m_rows = ts.iter().map(|&t| row(&|r| profile.m(t * r))).collect();
                (m_rows, row(&|r| (-s * r / root_d).exp()))
            })
            .collect();
        let values = bank.pointwise(|v| {
            let (mut r1, mut a, mut b2, mut cc) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for (m_rows, pois) in &tables {
                let base = crate::operators::combine(&m_rows[0], v);
                a = a.max(base.norm());
                cc = cc.max((base - crate::operators::combine(pois, v)).norm());
                let mut var = 0.0f64;
                for m_row in m_rows {
                    let z = crate::operators::combine(m_row, v);
                    r1 = r1.max(z.norm());
                    var = var.max((z - base).norm());
                }
                b2 += var * var;
            }
            [r1, a, b2.sqrt(), cc]
        });
        let column = |i: usize| norm_of(&values.iter().map(|x| x[i]).collect::<Vec<_>>(), &spec) / norm;
        let (r1, a, b, cq) = (column(0), column(1), column(2), column(3));
        let ksq = spec.k_squared();
        let mut c_bound_sq = 0.0;
        for (z, &k2) in c.coefficients.iter().zip(&ksq) {
            let rho = (k2 as f64).sqrt() / p.period;
            for (s, _) in &blocks {
                let diff = profile.m(s * rho) - (-s * rho / root_d).exp();
                c_bound_sq += z.norm_sqr() * diff * diff;
            }
        }
        let c_bound = c_bound_sq.sqrt() / norm;
        report.push(p.d, p.n, trial, "r1", r1);
        report.push(p.d, p.n, trial, "a", a);
        report.push(p.d, p.n, trial, "b", b);
        report.push(p.d, p.n, trial, "c", cq);
        report.push(p.d, p.n, trial, "c_bound", c_bound);
        report.check(Check::new(
            format!("r1 <= a + b (trial {trial})"),
            r1,
            Relation::AtMost,
            (a + b) * (1.0 + SPLIT_SLACK),
        ));
        report.check(Check::new(
            format!("c <= c_bound (trial {trial})"),
            cq,
            Relation::AtMost,
            c_bound * (1.0 + SPLIT_SLACK),
        ));
    }
    report.bound_quantity("a", Relation::AtMost, p.a_bound);
    report.bound_quantity("b", Relation::AtMost, p.b_bound);
    report.finish()
}

/// Log-spaced quadrature nodes in `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogNodes {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl LogNodes {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        log_nodes(self.t_min, self.t_max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoissonParams {
    pub d: usize,
    pub n: usize,
    pub period: f64,
    pub band: f64,
    pub trials: u32,
    pub grid: TruncationGrid,
    pub t_nodes: LogNodes,
    pub n_min: i32,
    pub n_max: i32,
    /// Allowance for the discretized square functions above `1/√2`.
    pub eps_disc: f64,
    pub max_ratio: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for PoissonParams {
    fn default() -> Self {
        Self {
            d: 4,
            n: 16,
            period: 1.0,
            band: 3.0,
            trials: 8,
            grid: TruncationGrid::default(),
            t_nodes: LogNodes {
                t_min: 1e-5,
                t_max: 1e3,
                count: 400,
            },
            n_min: -20,
            n_max: 20,
            eps_disc: 0.05,
            max_ratio: 4.0,
            quadrature: QuadratureConfig::default(),
        }
    }
}

/// Poisson maximal function, both square functions, and the telescoping
/// reconstruction, per trial; plus the single-mode `g` ratio.
pub fn poisson_suite(p: &PoissonParams, seed: u64) -> Result<ExperimentReport> {
    if p.trials == 0 {
        return domain("the Poisson suite needs at least one trial");
    }
    p.grid.validate()?;
    let nodes = p.t_nodes.nodes()?;
    let mut report = ExperimentReport::new("poisson", seed, p)?;
    let spec = GridSpec::new(p.d, p.n, p.period)?;
    let root_d = (p.d as f64).sqrt();
    let ratios = |f: &SpatialField| -> Result<[f64; 3]> {
        let norm = f.l2_norm();
        Ok([
            maximal_over(f, Family::Poisson, &p.grid, &p.quadrature)?.l2_norm() / norm,
            projection_square_sum(f, p.n_min, p.n_max)?.l2_norm() / norm,
            square_function(f, &nodes)?.l2_norm() / norm,
        ])
    };
    let mut worst_bound: f64 = 0.0;
    for trial in 0..p.trials {
        let f = random_band_limited(spec, p.band, trial_seed(seed, trial))?;
        let [pm, sq, g] = ratios(&f)?;
        report.push(p.d, p.n, trial, "poisson_max_ratio", pm);
        report.push(p.d, p.n, trial, "projection_square_ratio", sq);
        report.push(p.d, p.n, trial, "g_ratio", g);
        let rec = poisson_projection_sum(&f, p.n_min, p.n_max)?;
        let residual = rec.sub(&f)?.l2_norm() / f.l2_norm();
        report.push(p.d, p.n, trial, "telescoping_residual", residual);
        let c = forward_transform(&f)?;
        let shells: Vec<f64> = occupied_shells(&c)
            .into_iter()
            .filter(|&k2| k2 > 0)
            .map(|k2| (k2 as f64).sqrt() / p.period / root_d)
            .collect();
        let mean = c.coefficients[0].norm() / f.l2_norm();
        if let (Some(&lo), Some(&hi)) = (shells.first(), shells.last()) {
            let bound = (1.0 - (-(2f64.powi(p.n_min - 1)) * hi).exp())
                + (-(2f64.powi(p.n_max)) * lo).exp()
                + mean;
            worst_bound = worst_bound.max(bound);
        }
    }
    let single = SpatialField::plane_wave(spec, &unit_mode(p.d));
    let [pm, _, g] = ratios(&single)?;
    report.push(p.d, p.n, 0, "single_mode_poisson_max_ratio", pm);
    report.push(p.d, p.n, 0, "single_mode_g_ratio", g);
    report.bound_quantity("poisson_max_ratio", Relation::AtMost, p.max_ratio);
    let half = std::f64::consts::FRAC_1_SQRT_2 + p.eps_disc;
    report.bound_quantity("projection_square_ratio", Relation::AtMost, half);
    report.bound_quantity("g_ratio", Relation::AtMost, half);
    report.bound_quantity("telescoping_residual", Relation::AtMost, worst_bound);
    report.check(Check::new(
        "|single-mode g ratio - 1/2|",
        (g - 0.5).abs(),
        Relation::AtMost,
        1e-2,
    ));
    report.finish()
}

fn unit_mode(d: usize) -> Vec<i64> {
    let mut k = vec![0; d];
    k[0] = 1;
    k
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationParams {
    pub d: usize,
    pub n: usize,
    pub period: f64,
    pub t: f64,
    pub axis: usize,
    pub band: f64,
    /// Increasing; consecutive entries should double.
    pub n_angles: Vec<usize>,
    pub reference_angles: usize,
    pub max_error: f64,
    /// Accepted range of `error(2n)/error(n)`.
    pub halving_range: (f64, f64),
    pub sphere_dims: Vec<usize>,
}

impl Default for RotationParams {
    fn default() -> Self {
        Self {
            d: 2,
            n: 64,
            period: 1.0,
            t: 0.1,
            axis: 0,
            band: 1.5,
            n_angles: vec![64, 128, 256, 512],
            reference_angles: 256,
            max_error: 1e-2,
            halving_range: (0.25, 0.75),
            sphere_dims: (2..=16).collect(),
        }
    }
}

/// Relative L² error of the method of rotations against the spectral
/// truncated Riesz transform, and the sphere moment identities.
pub fn rotation_check(p: &RotationParams, seed: u64) -> Result<ExperimentReport> {
    if p.n_angles.is_empty() {
        return domain("rotation check needs at least one angle count");
    }
    supported(p.d)?;
    let mut report = ExperimentReport::new("rotation", seed, p)?;
    let spec = GridSpec::new(p.d, p.n, p.period)?;
    let f = random_band_limited(spec, p.band, trial_seed(seed, 0))?;
    let want = apply_symbol(
        &f,
        &MultiplierSymbol::TruncatedRiesz {
            axis: p.axis,
            t: p.t,
        },
        &QuadratureConfig::default(),
    )?;
    let mut errors = Vec::new();
    for &n in &p.n_angles {
        let e = rotation_reconstruct(&f, p.axis, p.t, n)?.relative_l2_error(&want)?;
        report.push(p.d, p.n, 0, format!("rotation_error[n_angles={n}]"), e);
        errors.push((n, e));
    }
    if let Some(&(n, e)) = errors.iter().find(|(n, _)| *n == p.reference_angles) {
        report.check(Check::new(
            format!("rotation error at n_angles={n}"),
            e,
            Relation::AtMost,
            p.max_error,
        ));
    }
    for w in errors.windows(2) {
        let ratio = w[1].1 / w[0].1;
        let name = format!("error ratio n_angles {}->{}", w[0].0, w[1].0);
        report.check(Check::new(format!("{name} lower"), ratio, Relation::AtLeast, p.halving_range.0));
        report.check(Check::new(format!("{name} upper"), ratio, Relation::AtMost, p.halving_range.1));
    }
    for &d in &p.sphere_dims {
        let area = sphere_area(d)?;
        let exact = area / d as f64;
        report.push(d, 0, 0, "sphere_moment_q2_defect", (sphere_moment(2.0, d)? - exact).abs() / exact);
        report.push(
            d,
            0,
            0,
            "cd_area_margin",
            (2.0 * d as f64 / std::f64::consts::PI).sqrt() - kernel_constant(d) * area,
        );
    }
    if !p.sphere_dims.is_empty() {
        report.bound_quantity("sphere_moment_q2_defect", Relation::AtMost, 1e-10);
        report.bound_quantity("cd_area_margin", Relation::AtLeast, 0.0);
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_small_run() {
        let p = FactorizationParams {
            d: 2,
            grid_sizes: vec![16, 32],
            trials: 2,
            max_residual: 1.0,
            ..Default::default()
        };
        let r = factorization_residual(&p, 3).unwrap();
        assert_eq!(r.values("residual[t=0.15]").len(), 4);
        assert!(r.values("residual[t=0.15]").iter().all(|v| *v >= 0.0));
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let again = factorization_residual(&p, 3).unwrap();
        assert_eq!(r.rows, again.rows);
    }

    #[test]
    fn factorization_rejects_infeasible_grids() {
        let p = FactorizationParams {
            grid_sizes: vec![1 << 12],
            ..Default::default()
        };
        assert!(matches!(
            factorization_residual(&p, 1),
            Err(crate::Error::Resource(_))
        ));
    }

    #[test]
    fn sweep_small_run() {
        let p = SweepParams {
            configs: vec![DimGrid { d: 4, n: 8 }, DimGrid { d: 6, n: 4 }],
            grid: TruncationGrid::new(-4, 2, 2).unwrap(),
            trials: 2,
            max_median_spread: 10.0,
            ..Default::default()
        };
        let r = norm_ratio_sweep(&p, 11).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        for q in ["r1", "r2", "r3", "r4"] {
            assert_eq!(r.values(q).len(), 4);
        }
        assert!(norm_ratio_sweep(&SweepParams { configs: vec![], ..p }, 1).is_err());
    }

    #[test]
    fn sweep_single_t_dominated_by_r1() {
        let p = SweepParams {
            configs: vec![DimGrid { d: 4, n: 8 }],
            grid: TruncationGrid::new(-3, 1, 1).unwrap(),
            trials: 1,
            ..Default::default()
        };
        let r = norm_ratio_sweep(&p, 5).unwrap();
        let spec = GridSpec::new(4, 8, 1.0).unwrap();
        let f = random_band_limited(spec, p.band, trial_seed(5, 0)).unwrap();
        let one = apply_symbol(&f, &MultiplierSymbol::FactorM { t: 0.5 }, &p.quadrature).unwrap();
        assert!(r.values("r1")[0] >= one.l2_norm() / f.l2_norm());
    }

    #[test]
    fn decomposition_small_run() {
        let p = DecompositionParams {
            n: 8,
            grid: TruncationGrid::new(-4, 2, 2).unwrap(),
            trials: 2,
            ..Default::default()
        };
        let r = decomposition_diagnostics(&p, 9).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let spec = GridSpec::new(4, 8, 1.0).unwrap();
        let f = random_band_limited(spec, p.band, trial_seed(9, 0)).unwrap();
        let direct = maximal_over(&f, Family::FactorM, &p.grid, &p.quadrature).unwrap();
        let r1 = r.value(4, 8, 0, "r1").unwrap();
        assert!((r1 - direct.l2_norm() / f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn poisson_small_run() {
        let p = PoissonParams {
            n: 8,
            trials: 2,
            grid: TruncationGrid::new(-6, 2, 1).unwrap(),
            ..Default::default()
        };
        let r = poisson_suite(&p, 2).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let pm = r.values("single_mode_poisson_max_ratio")[0];
        assert!((pm - (-(2f64.powi(-6)) * 0.5).exp()).abs() < 1e-12);
    }

    #[test]
    fn rotation_small_run() {
        let p = RotationParams {
            n: 32,
            n_angles: vec![32, 64],
            reference_angles: 64,
            max_error: 0.1,
            sphere_dims: vec![2, 3],
            ..Default::default()
        };
        let r = rotation_check(&p, 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(rotation_check(&RotationParams { d: 4, n: 4, ..p }, 4).is_err());
    }
}
