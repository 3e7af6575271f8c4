//! Command-line arguments, the JSON run configuration, and their merge.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "riesz",
    version,
    about = "Experiments on truncated Riesz transforms and their maximal functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,

    /// Run seed; trials derive their own seeds from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for the CSV and JSON outputs.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Bessel envelope, |J| ≤ 1, Stirling and Gautschi bounds.
    VerifySpecfun(Overrides),
    /// m(0) = 1 and the small-argument, large-argument and derivative bounds.
    VerifyMultiplier(Overrides),
    /// Spatial truncated Riesz against the spectral factorization.
    Factorization(Overrides),
    /// Maximal-function norm ratios across dimensions.
    NormSweep(Overrides),
    /// Dyadic / local-variation split of the maximal function.
    Decomposition(Overrides),
    /// Poisson maximal function, square functions and projections.
    Poisson(Overrides),
    /// The dyadic numerical inequality for a one-dimensional function.
    Ineq(Overrides),
    /// Method of rotations against the spectral truncated Riesz transform.
    Rotation(Overrides),
    /// Merge earlier CSV outputs into one summary.
    Report {
        /// CSV files written by earlier runs.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifySpecfun,
    VerifyMultiplier,
    Factorization,
    NormSweep,
    Decomposition,
    Poisson,
    Ineq,
    Rotation,
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::VerifySpecfun => "verify-specfun",
            Self::VerifyMultiplier => "verify-multiplier",
            Self::Factorization => "factorization",
            Self::NormSweep => "norm-sweep",
            Self::Decomposition => "decomposition",
            Self::Poisson => "poisson",
            Self::Ineq => "ineq",
            Self::Rotation => "rotation",
            Self::Report => "report",
        }
    }
}

/// Experiment parameters settable from flags or from the `overrides` object
/// of a JSON configuration.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// Dimensions, comma separated.
    #[arg(long, alias = "d", value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,

    /// Points per axis, comma separated (one per dimension for norm-sweep).
    #[arg(long, value_delimiter = ',')]
    pub grid_n: Option<Vec<usize>>,

    #[arg(long)]
    pub trials: Option<u32>,

    /// Truncation grid `n_min:n_max:depth` (values 2^n (1 + j/2^depth), n_min ≤ n ≤ n_max).
    #[arg(long, allow_hyphen_values = true)]
    pub t_grid: Option<String>,

    /// Frequency radius of the random band-limited inputs.
    #[arg(long)]
    pub band: Option<f64>,

    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Argument grid `log:start:end:count` or `lin:start:end:count`.
    #[arg(long)]
    pub x_grid: Option<String>,

    /// Truncation radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,

    /// Quadrature sizes on the circle, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n_angles: Option<Vec<usize>>,

    /// Function for `ineq`: `t`, `linear:a:b`, `const:c`, `sin:f`, `cos:f`
    /// (f in cycles per unit) or `pwl:t0=v0,t1=v1,…`.
    #[arg(long)]
    pub g: Option<String>,

    /// Dyadic interval [2^n, 2^{n+1}] for `ineq`.
    #[arg(long, allow_hyphen_values = true)]
    pub interval_n: Option<i32>,

    /// Deepest level of the right-hand side for `ineq`.
    #[arg(long)]
    pub l_max: Option<u32>,
}

impl Overrides {
    /// Field-wise `self` where set, otherwise `fallback`.
    pub fn or(self, fallback: Overrides) -> Overrides {
        Overrides {
            dims: self.dims.or(fallback.dims),
            grid_n: self.grid_n.or(fallback.grid_n),
            trials: self.trials.or(fallback.trials),
            t_grid: self.t_grid.or(fallback.t_grid),
            band: self.band.or(fallback.band),
            tol: self.tol.or(fallback.tol),
            x_grid: self.x_grid.or(fallback.x_grid),
            t: self.t.or(fallback.t),
            n_angles: self.n_angles.or(fallback.n_angles),
            g: self.g.or(fallback.g),
            interval_n: self.interval_n.or(fallback.interval_n),
            l_max: self.l_max.or(fallback.l_max),
        }
    }

    /// Names of the fields that are set.
    pub fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut note = |set: bool, name| {
            if set {
                v.push(name)
            }
        };
        note(self.dims.is_some(), "dims");
        note(self.grid_n.is_some(), "grid_n");
        note(self.trials.is_some(), "trials");
        note(self.t_grid.is_some(), "t_grid");
        note(self.band.is_some(), "band");
        note(self.tol.is_some(), "tol");
        note(self.x_grid.is_some(), "x_grid");
        note(self.t.is_some(), "t");
        note(self.n_angles.is_some(), "n_angles");
        note(self.g.is_some(), "g");
        note(self.interval_n.is_some(), "interval_n");
        note(self.l_max.is_some(), "l_max");
        v
    }
}

/// The JSON form of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub overrides: Overrides,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

pub const DEFAULT_SEED: u64 = 42;

/// A fully merged invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub command: Command,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub overrides: Overrides,
    pub inputs: Vec<PathBuf>,
}

pub fn resolve(cli: Cli) -> Result<Resolved> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (command, flags, inputs) = match cli.command {
        CommandArgs::VerifySpecfun(o) => (Command::VerifySpecfun, o, vec![]),
        CommandArgs::VerifyMultiplier(o) => (Command::VerifyMultiplier, o, vec![]),
        CommandArgs::Factorization(o) => (Command::Factorization, o, vec![]),
        CommandArgs::NormSweep(o) => (Command::NormSweep, o, vec![]),
        CommandArgs::Decomposition(o) => (Command::Decomposition, o, vec![]),
        CommandArgs::Poisson(o) => (Command::Poisson, o, vec![]),
        CommandArgs::Ineq(o) => (Command::Ineq, o, vec![]),
        CommandArgs::Rotation(o) => (Command::Rotation, o, vec![]),
        CommandArgs::Report { inputs } => (Command::Report, Overrides::default(), inputs),
    };
    if let Some(c) = config.command {
        if c != command {
            return Err(CliError::Usage(format!(
                "config names command {} but {} was requested",
                c.name(),
                command.name()
            )));
        }
    }
    Ok(Resolved {
        command,
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        output_dir: cli
            .output
            .or(config.output_dir)
            .unwrap_or_else(|| PathBuf::from("results")),
        overrides: flags.or(config.overrides),
        inputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("riesz").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse_lists_and_negative_values() {
        let cli = parse(&["norm-sweep", "--dims", "4,6", "--t-grid", "-3:1:2", "--seed", "7"]);
        let r = resolve(cli).unwrap();
        assert_eq!(r.command, Command::NormSweep);
        assert_eq!(r.seed, 7);
        assert_eq!(r.overrides.dims, Some(vec![4, 6]));
        assert_eq!(r.overrides.t_grid.as_deref(), Some("-3:1:2"));
        let cli = parse(&["verify-multiplier", "--d", "4,8", "--x-grid", "log:1e-3:1e3:200"]);
        assert_eq!(resolve(cli).unwrap().overrides.dims, Some(vec![4, 8]));
        let cli = parse(&["ineq", "--interval-n", "-2"]);
        assert_eq!(resolve(cli).unwrap().overrides.interval_n, Some(-2));
    }

    #[test]
    fn defaults() {
        let r = resolve(parse(&["poisson"])).unwrap();
        assert_eq!(r.seed, DEFAULT_SEED);
        assert_eq!(r.output_dir, PathBuf::from("results"));
        assert!(r.overrides.present().is_empty());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"command": "norm-sweep", "seed": 5, "output_dir": "x",
                "overrides": {"dims": [4], "trials": 3, "band": 1.25}}"#,
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let r = resolve(parse(&["norm-sweep", "--config", p, "--trials", "2"])).unwrap();
        assert_eq!(r.seed, 5);
        assert_eq!(r.output_dir, PathBuf::from("x"));
        assert_eq!(r.overrides.trials, Some(2));
        assert_eq!(r.overrides.dims, Some(vec![4]));
        assert_eq!(r.overrides.band, Some(1.25));
        assert!(matches!(
            resolve(parse(&["poisson", "--config", p])),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 1, "colour": "blue"}"#).unwrap();
        assert!(matches!(RunConfig::load(&path), Err(CliError::Usage(_))));
        std::fs::write(&path, r#"{"overrides": {"dimz": [4]}}"#).unwrap();
        assert!(matches!(RunConfig::load(&path), Err(CliError::Usage(_))));
    }

    #[test]
    fn report_needs_inputs() {
        assert!(Cli::try_parse_from(["riesz", "report"]).is_err());
    }
}
