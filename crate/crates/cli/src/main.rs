//! `riesz`: command-line driver for the truncated Riesz transform experiments.
//!
//! Exit status: 0 when every check holds, 1 on a failed bound or a conflict
//! between merged results, 2 on a usage error, 3 when a resource limit is hit.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{resolve, Cli, Command};
use crate::error::Result;

fn run(cli: Cli) -> Result<bool> {
    let r = resolve(cli)?;
    if r.command == Command::Report {
        let records = output::merge_csv(&r.inputs)?;
        let path = output::write_merged(&r.output_dir, &records)?;
        print!("{}", output::summary_table(&records, &[]));
        println!("\n{} rows merged into {}", records.len(), path.display());
        return Ok(true);
    }
    output::ensure_dir(&r.output_dir)?;
    let report = commands::run_experiment(r.command, &r.overrides, r.seed)?;
    let (csv, json) = output::write_report(&r.output_dir, &report)?;
    print!("{}", output::summary_table(&report.records(), &report.checks));
    let failed = report.failures().count();
    println!();
    if failed == 0 {
        println!("all {} checks passed", report.checks.len());
    } else {
        println!("{failed} of {} checks failed", report.checks.len());
        for c in report.failures() {
            println!("  {}: {} {} {}", c.name, c.value, c.relation.symbol(), c.bound);
        }
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::error::CliError;

    #[test]
    fn usage_error_exit_code() {
        let e: CliError = riesz_core::Error::Domain("x".into()).into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = riesz_core::Error::Resource("x".into()).into();
        assert_eq!(e.exit_code(), 3);
    }
}
