//! Translation of merged overrides into experiment parameters.

use std::str::FromStr;

use riesz_core::experiments::{
    decomposition_diagnostics, default_grid_size, factorization_residual,
    multiplier_bound_suite, norm_ratio_sweep, numerical_inequality_check, poisson_suite,
    rotation_check, specfun_suite, DecompositionParams, DimGrid, ExperimentReport,
    FactorizationParams, IneqParams, MultiplierSuiteParams, PoissonParams, RotationParams,
    SpecfunSuiteParams, SweepParams,
};
use riesz_core::operators::{supported, TruncationGrid};
use riesz_core::specfun::QuadratureConfig;

use crate::config::{Command, Overrides};
use crate::error::{CliError, Result};

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

/// Override names each command understands.
pub fn accepted(command: Command) -> &'static [&'static str] {
    match command {
        Command::VerifySpecfun => &["tol", "x_grid"],
        Command::VerifyMultiplier => &["dims", "x_grid", "tol"],
        Command::Factorization => &["dims", "grid_n", "t", "band", "trials", "tol"],
        Command::NormSweep => &["dims", "grid_n", "t_grid", "band", "trials", "tol"],
        Command::Decomposition => &["dims", "grid_n", "t_grid", "band", "trials", "tol"],
        Command::Poisson => &["dims", "grid_n", "t_grid", "band", "trials", "tol"],
        Command::Ineq => &["g", "interval_n", "l_max"],
        Command::Rotation => &["dims", "grid_n", "t", "n_angles", "band"],
        Command::Report => &[],
    }
}

fn check_accepted(command: Command, o: &Overrides) -> Result<()> {
    let allowed = accepted(command);
    let extra: Vec<&str> = o
        .present()
        .into_iter()
        .filter(|k| !allowed.contains(k))
        .collect();
    if extra.is_empty() {
        Ok(())
    } else {
        usage(format!(
            "{} does not take {}",
            command.name(),
            extra.join(", ")
        ))
    }
}

fn parse<T>(what: &str, s: &Option<String>) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    s.as_deref()
        .map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("--{what}: {e}"))))
        .transpose()
}

fn nonempty<T: Clone>(what: &str, v: &Option<Vec<T>>) -> Result<Option<Vec<T>>> {
    match v {
        Some(list) if list.is_empty() => usage(format!("--{what} must not be empty")),
        other => Ok(other.clone()),
    }
}

fn single<T: Copy>(what: &str, v: &Option<Vec<T>>) -> Result<Option<T>> {
    match nonempty(what, v)? {
        Some(list) if list.len() > 1 => usage(format!("--{what} takes one value here")),
        Some(list) => Ok(Some(list[0])),
        None => Ok(None),
    }
}

fn quadrature(o: &Overrides) -> Result<QuadratureConfig> {
    let mut q = QuadratureConfig::default();
    if let Some(tol) = o.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return usage("--tol must be positive");
        }
        q.abs_tol = tol;
    }
    Ok(q)
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Runs one experiment command.
pub fn run_experiment(command: Command, o: &Overrides, seed: u64) -> Result<ExperimentReport> {
    check_accepted(command, o)?;
    let grid = parse::<TruncationGrid>("t-grid", &o.t_grid)?;
    let report = match command {
        Command::VerifySpecfun => {
            let mut p = SpecfunSuiteParams {
                quadrature: quadrature(o)?,
                ..Default::default()
            };
            set(&mut p.t_grid, parse("x-grid", &o.x_grid)?);
            specfun_suite(&p, seed)?
        }
        Command::VerifyMultiplier => {
            let mut p = MultiplierSuiteParams {
                quadrature: quadrature(o)?,
                ..Default::default()
            };
            set(&mut p.dims, nonempty("dims", &o.dims)?);
            set(&mut p.x_grid, parse("x-grid", &o.x_grid)?);
            multiplier_bound_suite(&p, seed)?
        }
        Command::Factorization => {
            let mut p = FactorizationParams {
                quadrature: quadrature(o)?,
                ..Default::default()
            };
            set(&mut p.d, single("dims", &o.dims)?);
            set(&mut p.grid_sizes, nonempty("grid-n", &o.grid_n)?);
            set(&mut p.t_list, nonempty("t", &o.t)?);
            set(&mut p.band, o.band);
            set(&mut p.trials, o.trials);
            factorization_residual(&p, seed)?
        }
        Command::NormSweep => {
            let mut p = SweepParams {
                quadrature: quadrature(o)?,
                ..Default::default()
            };
            if let Some(dims) = nonempty("dims", &o.dims)? {
                p.configs = sweep_configs(&dims, nonempty("grid-n", &o.grid_n)?)?;
            } else if o.grid_n.is_some() {
                return usage("--grid-n for norm-sweep needs --dims");
            }
            set(&mut p.grid, grid);
            set(&mut p.band, o.band);
            set(&mut p.trials, o.trials);
            norm_ratio_sweep(&p, seed)?
        }
        Command::Decomposition => {
            let mut p = DecompositionParams {
                quadrature: quadrature(o)?,
                ..Default::default()
            };
            set(&mut p.d, single("dims", &o.dims)?);
            match single("grid-n", &o.grid_n)? {
                Some(n) => p.n = n,
                None if o.dims.is_some() => p.n = grid_for(p.d)?,
                None => {}
            }
            set(&mut p.grid, grid);
            set(&mut p.band, o.band);
            set(&mut p.trials, o.trials);
            decomposition_diagnostics(&p, seed)?
        }
        Command::Poisson => {
            let mut p = PoissonParams {
                quadrature: quadrature(o)?,
                ..Default::default()
            };
            set(&mut p.d, single("dims", &o.dims)?);
            match single("grid-n", &o.grid_n)? {
                Some(n) => p.n = n,
                None if o.dims.is_some() => p.n = grid_for(p.d)?,
                None => {}
            }
            set(&mut p.grid, grid);
            set(&mut p.band, o.band);
            set(&mut p.trials, o.trials);
            poisson_suite(&p, seed)?
        }
        Command::Ineq => {
            let mut p = IneqParams::default();
            set(&mut p.g, parse("g", &o.g)?);
            set(&mut p.n, o.interval_n);
            set(&mut p.l_max, o.l_max);
            numerical_inequality_check(&p, seed)?
        }
        Command::Rotation => {
            let mut p = RotationParams::default();
            set(&mut p.d, single("dims", &o.dims)?);
            supported(p.d)?;
            set(&mut p.n, single("grid-n", &o.grid_n)?);
            set(&mut p.t, single("t", &o.t)?);
            set(&mut p.band, o.band);
            if let Some(mut angles) = nonempty("n-angles", &o.n_angles)? {
                angles.sort_unstable();
                angles.dedup();
                if !angles.contains(&p.reference_angles) {
                    p.reference_angles = *angles.last().unwrap();
                }
                p.n_angles = angles;
            }
            rotation_check(&p, seed)?
        }
        Command::Report => return usage("report is not an experiment"),
    };
    Ok(report)
}

fn grid_for(d: usize) -> Result<usize> {
    default_grid_size(d)
        .ok_or_else(|| CliError::Usage(format!("no default grid size for d = {d}; pass --grid-n")))
}

fn sweep_configs(dims: &[usize], sizes: Option<Vec<usize>>) -> Result<Vec<DimGrid>> {
    let sizes = match sizes {
        None => dims.iter().map(|&d| grid_for(d)).collect::<Result<Vec<_>>>()?,
        Some(s) if s.len() == 1 => vec![s[0]; dims.len()],
        Some(s) if s.len() == dims.len() => s,
        Some(s) => {
            return usage(format!(
                "--grid-n has {} values for {} dimensions",
                s.len(),
                dims.len()
            ))
        }
    };
    Ok(dims
        .iter()
        .zip(sizes)
        .map(|(&d, n)| DimGrid { d, n })
        .collect())
}
