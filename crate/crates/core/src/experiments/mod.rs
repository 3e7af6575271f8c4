//! Seeded experiment drivers and the reports they produce.
//!
//! Every driver takes a parameter struct and a seed and returns an
//! [`ExperimentReport`]: a sorted list of measured rows plus the pass/fail
//! checks evaluated on them. Rows are reproducible bit for bit from
//! `(experiment_id, seed, parameters)`; only `created_at` varies between runs.

mod bounds;
mod inequality;
mod suites;

pub use bounds::*;
pub use inequality::*;
pub use suites::*;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seed of trial `trial` derived from the run seed.
pub fn trial_seed(seed: u64, trial: u32) -> u64 {
    seed ^ (u64::from(trial) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One measured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub d: usize,
    /// Points per axis, or the sample count for grid-free experiments.
    #[serde(rename = "N")]
    pub n: usize,
    /// Trial index, or the sample index for deterministic sweeps.
    pub trial: u32,
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Below,
}

impl Relation {
    pub fn holds(&self, value: f64, bound: f64) -> bool {
        match self {
            Self::AtMost => value <= bound,
            Self::AtLeast => value >= bound,
            Self::Below => value < bound,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Self::AtMost => "<=",
            Self::AtLeast => ">=",
            Self::Below => "<",
        }
    }
}

/// A pass/fail comparison of a measured value against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Set when the check covers every row of one quantity.
    pub quantity: Option<String>,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        Self {
            name: name.into(),
            quantity: None,
            value,
            relation,
            bound,
            passed: relation.holds(value, bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, String>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub created_at: String,
}

impl ExperimentReport {
    pub fn new<P: Serialize>(experiment_id: &str, seed: u64, params: &P) -> Result<Self> {
        let mut parameters = BTreeMap::new();
        if let serde_json::Value::Object(map) = serde_json::to_value(params)? {
            for (k, v) in map {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                parameters.insert(k, text);
            }
        }
        Ok(Self {
            experiment_id: experiment_id.to_string(),
            seed,
            parameters,
            rows: Vec::new(),
            checks: Vec::new(),
            created_at: String::new(),
        })
    }

    pub fn push(&mut self, d: usize, n: usize, trial: u32, quantity: impl Into<String>, value: f64) {
        self.rows.push(Row {
            d,
            n,
            trial,
            quantity: quantity.into(),
            value,
        });
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Checks every row of `quantity` against `bound`, recording the worst value.
    pub fn bound_quantity(&mut self, quantity: &str, relation: Relation, bound: f64) {
        let values = self.values(quantity);
        let worst = match relation {
            Relation::AtLeast => values.iter().copied().fold(f64::INFINITY, f64::min),
            _ => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        let passed = !values.is_empty() && values.iter().all(|&v| relation.holds(v, bound));
        self.checks.push(Check {
            name: format!("{quantity} {} {bound:e}", relation.symbol()),
            quantity: Some(quantity.to_string()),
            value: worst,
            relation,
            bound,
            passed,
        });
    }

    /// Values of one quantity in row order.
    pub fn values(&self, quantity: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| r.value)
            .collect()
    }

    /// The value of `quantity` in the row `(d, n, trial)`.
    pub fn value(&self, d: usize, n: usize, trial: u32, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.d == d && r.n == n && r.trial == trial && r.quantity == quantity)
            .map(|r| r.value)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Sorts the rows and stamps the report.
    pub fn finish(mut self) -> Result<Self> {
        if self.rows.is_empty() {
            return Err(Error::Domain(format!(
                "experiment {} produced no rows",
                self.experiment_id
            )));
        }
        self.rows.sort_by(|a, b| {
            (a.d, a.n, &a.quantity, a.trial).cmp(&(b.d, b.n, &b.quantity, b.trial))
        });
        self.created_at = chrono::Utc::now().to_rfc3339();
        Ok(self)
    }

    pub fn records(&self) -> Vec<CsvRecord> {
        self.rows
            .iter()
            .map(|r| CsvRecord {
                experiment_id: self.experiment_id.clone(),
                seed: self.seed,
                d: r.d,
                n: r.n,
                trial: r.trial,
                quantity: r.quantity.clone(),
                value: r.value,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_records(w, &self.records())
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

/// One CSV line: `experiment_id, seed, d, N, trial, quantity, value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub experiment_id: String,
    pub seed: u64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: u32,
    pub quantity: String,
    pub value: f64,
}

impl CsvRecord {
    /// Everything except the value.
    pub fn key(&self) -> (&str, u64, usize, usize, u32, &str) {
        (
            &self.experiment_id,
            self.seed,
            self.d,
            self.n,
            self.trial,
            &self.quantity,
        )
    }
}

pub fn write_records<W: Write>(w: W, records: &[CsvRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<CsvRecord>> {
    let mut input = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for rec in input.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// min / median / max of one `(d, quantity)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub d: usize,
    pub quantity: String,
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// Groups records by `(d, quantity)` in sorted order.
pub fn summarize(records: &[CsvRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(usize, &str), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.d, &r.quantity)).or_default().push(r.value);
    }
    groups
        .into_iter()
        .map(|((d, quantity), mut v)| {
            v.sort_by(f64::total_cmp);
            let n = v.len();
            let median = if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            };
            Summary {
                d,
                quantity: quantity.to_string(),
                count: n,
                min: v[0],
                median,
                max: v[n - 1],
            }
        })
        .collect()
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
