//! Atomic result files, the summary table, and merging of earlier runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use riesz_core::experiments::{
    read_records, summarize, write_records, Check, CsvRecord, ExperimentReport,
};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Failed(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Usage(format!("output directory {} is not usable: {e}", dir.display()))
    })
}

/// Writes through a temporary file in the same directory, then renames it
/// over `path`.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush().map_err(|e| io_error(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// Paths of the CSV and JSON files for one run.
pub fn result_paths(dir: &Path, experiment_id: &str, seed: u64) -> (PathBuf, PathBuf) {
    let stem = format!("{experiment_id}_seed{seed}");
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<(PathBuf, PathBuf)> {
    ensure_dir(dir)?;
    let (csv, json) = result_paths(dir, &report.experiment_id, report.seed);
    write_atomic(&csv, |w| Ok(report.write_csv(w)?))?;
    write_atomic(&json, |w| Ok(report.write_json(w)?))?;
    Ok((csv, json))
}

fn num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.4e}")
    }
}

/// One line per `(d, quantity)` group, then the checks not tied to a quantity.
pub fn summary_table(records: &[CsvRecord], checks: &[Check]) -> String {
    let mut by_quantity: BTreeMap<&str, Vec<&Check>> = BTreeMap::new();
    for c in checks {
        if let Some(q) = &c.quantity {
            by_quantity.entry(q).or_default().push(c);
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<40} {:>3} {:>5} {:>12} {:>12} {:>12}  {:<16} {}",
        "quantity", "d", "count", "min", "median", "max", "bound", "status"
    );
    for s in summarize(records) {
        let attached = by_quantity.get(s.quantity.as_str());
        let (bound, status) = match attached {
            Some(cs) => {
                let bound = cs
                    .iter()
                    .map(|c| format!("{} {}", c.relation.symbol(), num(c.bound)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let group = records
                    .iter()
                    .filter(|r| r.d == s.d && r.quantity == s.quantity);
                let ok = group
                    .clone()
                    .all(|r| cs.iter().all(|c| c.relation.holds(r.value, c.bound)));
                (bound, if ok { "pass" } else { "FAIL" })
            }
            None => ("-".to_string(), "-"),
        };
        let _ = writeln!(
            out,
            "{:<40} {:>3} {:>5} {:>12} {:>12} {:>12}  {:<16} {}",
            s.quantity,
            s.d,
            s.count,
            num(s.min),
            num(s.median),
            num(s.max),
            bound,
            status
        );
    }
    let loose: Vec<&Check> = checks.iter().filter(|c| c.quantity.is_none()).collect();
    if !loose.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<56} {:>12}  {:<16} {}", "check", "value", "bound", "status");
        for c in loose {
            let _ = writeln!(
                out,
                "{:<56} {:>12}  {:<16} {}",
                c.name,
                num(c.value),
                format!("{} {}", c.relation.symbol(), num(c.bound)),
                if c.passed { "pass" } else { "FAIL" }
            );
        }
    }
    out
}

/// Reads CSV outputs and merges them, dropping exact duplicates and failing
/// on rows that share a key but disagree in value.
pub fn merge_csv(inputs: &[PathBuf]) -> Result<Vec<CsvRecord>> {
    let mut merged: BTreeMap<(String, u64, usize, usize, String, u32), CsvRecord> =
        BTreeMap::new();
    for path in inputs {
        let file = File::open(path)
            .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
        let records = read_records(file)
            .map_err(|e| CliError::Usage(format!("{} is not a result file: {e}", path.display())))?;
        for r in records {
            let (id, seed, d, n, trial, q) = r.key();
            let key = (id.to_string(), seed, d, n, q.to_string(), trial);
            match merged.get(&key) {
                Some(old) if old.value.to_bits() != r.value.to_bits() => {
                    return Err(CliError::Integrity(format!(
                        "{id} seed={seed} d={d} N={n} trial={trial} {q}: {} vs {} (from {})",
                        old.value,
                        r.value,
                        path.display()
                    )));
                }
                Some(_) => {}
                None => {
                    merged.insert(key, r);
                }
            }
        }
    }
    Ok(merged.into_values().collect())
}

pub fn write_merged(dir: &Path, records: &[CsvRecord]) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join("report.csv");
    write_atomic(&path, |w| Ok(write_records(w, records)?))?;
    Ok(path)
}
