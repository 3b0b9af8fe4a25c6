//! CSV and JSON record files.
//!
//! Record CSVs may begin with `#` comment lines; writers put the run
//! configuration there as one line of JSON so every file carries its provenance.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::VqeTraceRecord;
use crate::optim::{OptimizationTrace, TracePoint};
use crate::qubo::Formulation;

/// Version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Solver backing a `solve` run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Qaoa,
    Vqe,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Qaoa => "qaoa",
            Method::Vqe => "vqe",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "qaoa" => Ok(Method::Qaoa),
            "vqe" => Ok(Method::Vqe),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}` (expected exact, qaoa or vqe)"))),
        }
    }
}

/// Full invocation record embedded in every artifact. `seed` is always set,
/// defaulted values included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub output: Option<String>,
    pub formulation: Option<Formulation>,
    pub method: Option<Method>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub qubit_cap: usize,
    pub extended_scale: bool,
    /// Optimizer or pipeline settings specific to the command.
    pub optimizer: serde_json::Value,
}

impl RunConfig {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        RunConfig {
            command: command.into(),
            inputs: Vec::new(),
            output: None,
            formulation: None,
            method: None,
            n: None,
            m: None,
            seed,
            restarts: 1,
            qubit_cap: crate::exact::DEFAULT_QUBIT_CAP,
            extended_scale: false,
            optimizer: serde_json::Value::Null,
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}

pub fn csv_string<T: Serialize>(provenance: Option<&serde_json::Value>, records: &[T]) -> Result<String> {
    let mut out = String::new();
    if let Some(p) = provenance {
        out.push_str("# run_config: ");
        out.push_str(&serde_json::to_string(p)?);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    out.push_str(std::str::from_utf8(&bytes).expect("csv writer emits utf-8"));
    Ok(out)
}

pub fn write_csv<T: Serialize>(path: &Path, provenance: Option<&serde_json::Value>, records: &[T]) -> Result<()> {
    fs::write(path, csv_string(provenance, records)?)?;
    Ok(())
}

/// Parses records, reporting deserialization failures with their line number.
pub fn parse_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (idx, rec) in r.deserialize().enumerate() {
        out.push(rec.map_err(|e: csv::Error| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(idx + 2);
            Error::Schema { row, message: e.to_string() }
        })?);
    }
    Ok(out)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    parse_csv(&fs::read_to_string(path)?)
}

/// The JSON object embedded in a CSV's `# run_config:` line, if any.
pub fn csv_provenance(text: &str) -> Option<serde_json::Value> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# run_config: "))
        .and_then(|j| serde_json::from_str(j).ok())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// One row of the long-format VQE trace CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub run_id: usize,
    pub pair_id: usize,
    pub seed: u64,
    pub iteration: usize,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeFinalRow {
    pub run_id: usize,
    pub pair_id: usize,
    pub seed: u64,
    pub final_objective: f64,
    pub best_expectation: f64,
    pub exact_min_energy: f64,
}

pub fn trace_rows(records: &[VqeTraceRecord]) -> Vec<TraceRow> {
    records
        .iter()
        .flat_map(|r| {
            r.trace.points.iter().map(move |p| TraceRow {
                run_id: r.run_id,
                pair_id: r.pair_id,
                seed: r.seed,
                iteration: p.iteration,
                objective: p.objective,
            })
        })
        .collect()
}

pub fn final_rows(records: &[VqeTraceRecord]) -> Vec<VqeFinalRow> {
    records
        .iter()
        .map(|r| VqeFinalRow {
            run_id: r.run_id,
            pair_id: r.pair_id,
            seed: r.seed,
            final_objective: r.final_objective,
            best_expectation: r.best_expectation,
            exact_min_energy: r.exact_min_energy,
        })
        .collect()
}

/// Regroups long-format rows into one trace per run, in run order.
pub fn traces_from_rows(rows: &[TraceRow]) -> Vec<(usize, OptimizationTrace)> {
    let mut out: Vec<(usize, OptimizationTrace)> = Vec::new();
    let mut sorted: Vec<&TraceRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.run_id, r.iteration));
    for r in sorted {
        if out.last().map(|(id, _)| *id) != Some(r.run_id) {
            out.push((r.run_id, OptimizationTrace::default()));
        }
        let trace = &mut out.last_mut().expect("pushed above").1;
        trace.points.push(TracePoint { iteration: r.iteration, objective: r.objective, parameters: None });
    }
    out
}
