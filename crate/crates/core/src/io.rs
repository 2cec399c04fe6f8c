//! Data files in, reports and traces out.
//!
//! Input comes as a CSV column (one number per line, `#` comments and
//! blank lines skipped) or as a JSON object `{"y": [...], "x_true": [...],
//! "name": "..."}`. Reports are JSON; traces are plot-ready CSV. All
//! numbers are written in shortest round-trip form and every write goes
//! through a temporary file that is renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Spectrum;
use crate::signal::Observations;
use crate::solver::{
    IterationRecord, KtStatus, MultiStartResult, RunResult, SolverConfig, StopReason, RNG_ID,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    CsvColumn,
    JsonObject,
}

/// Contents of a JSON data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_true: Option<Vec<f64>>,
}

fn parse_error(path: &Path, location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        location: location.into(),
        message: message.into(),
    }
}

fn check_value(path: &Path, location: String, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(parse_error(path, location, format!("non-finite value {v}")));
    }
    if v < 0.0 {
        return Err(parse_error(path, location, format!("negative value {v}")));
    }
    Ok(v)
}

fn sniff(text: &str) -> DataFormat {
    match text.trim_start().as_bytes().first() {
        Some(b'{') => DataFormat::JsonObject,
        _ => DataFormat::CsvColumn,
    }
}

fn parse_csv(path: &Path, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // a single line may also hold comma-separated values
        for field in line.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            let location = format!("line {}", idx + 1);
            let v: f64 = field
                .parse()
                .map_err(|_| parse_error(path, location.clone(), format!("not a number: {field:?}")))?;
            out.push(check_value(path, location, v)?);
        }
    }
    Ok(out)
}

fn parse_json(path: &Path, text: &str) -> Result<DataFile> {
    let file: DataFile = serde_json::from_str(text).map_err(|e| {
        parse_error(path, format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    for (i, &v) in file.y.iter().enumerate() {
        check_value(path, format!("y[{i}]"), v)?;
    }
    if let Some(x) = &file.x_true {
        for (i, &v) in x.iter().enumerate() {
            check_value(path, format!("x_true[{i}]"), v)?;
        }
    }
    Ok(file)
}

/// Reads a data file; `format = None` sniffs it (leading `{` means JSON).
pub fn read_data_file(path: &Path, format: Option<DataFormat>) -> Result<DataFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = match format.unwrap_or_else(|| sniff(&text)) {
        DataFormat::CsvColumn => DataFile {
            name: None,
            y: parse_csv(path, &text)?,
            x_true: None,
        },
        DataFormat::JsonObject => parse_json(path, &text)?,
    };
    if file.y.is_empty() {
        return Err(parse_error(path, "file", "no values found"));
    }
    Ok(file)
}

/// Reads the data vector from a file.
pub fn read_observations(path: &Path, format: Option<DataFormat>) -> Result<Vec<f64>> {
    read_data_file(path, format).map(|f| f.y)
}

/// Reads a plain vector, such as a candidate or starting `x`.
///
/// Accepts a CSV column, a JSON array, or a JSON object with an `"x"` or
/// `"y"` array.
pub fn read_vector(path: &Path, format: Option<DataFormat>) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let trimmed = text.trim_start();
    let values = match format {
        Some(DataFormat::CsvColumn) => parse_csv(path, &text)?,
        _ if trimmed.starts_with('[') => {
            let v: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
                parse_error(path, format!("line {} column {}", e.line(), e.column()), e.to_string())
            })?;
            for (i, &x) in v.iter().enumerate() {
                check_value(path, format!("[{i}]"), x)?;
            }
            v
        }
        Some(DataFormat::JsonObject) => read_json_vector(path, &text)?,
        None if trimmed.starts_with('{') => read_json_vector(path, &text)?,
        None => parse_csv(path, &text)?,
    };
    if values.is_empty() {
        return Err(parse_error(path, "file", "no values found"));
    }
    Ok(values)
}

fn read_json_vector(path: &Path, text: &str) -> Result<Vec<f64>> {
    #[derive(Deserialize)]
    struct Either {
        x: Option<Vec<f64>>,
        y: Option<Vec<f64>>,
    }
    let e: Either = serde_json::from_str(text).map_err(|e| {
        parse_error(path, format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let (key, v) = match (e.x, e.y) {
        (Some(x), _) => ("x", x),
        (None, Some(y)) => ("y", y),
        (None, None) => return Err(parse_error(path, "object", "expected an \"x\" or \"y\" array")),
    };
    for (i, &x) in v.iter().enumerate() {
        check_value(path, format!("{key}[{i}]"), x)?;
    }
    Ok(v)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KtSummary {
    pub status: Vec<KtStatus>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub solver: SolverConfig,
    pub rng: String,
}

/// Short per-start summary inside a multi-start report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: Option<u64>,
    pub divergence: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub kt_pass: bool,
    pub x_final: Vec<f64>,
}

impl From<&RunResult> for RunSummary {
    fn from(r: &RunResult) -> Self {
        RunSummary {
            seed: r.seed,
            divergence: r.divergence,
            iterations: r.iterations,
            stop_reason: r.stop_reason,
            kt_pass: r.kt.pass,
            x_final: r.x_final.as_slice().to_vec(),
        }
    }
}

/// JSON report of a run or of the best run among several starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub m: usize,
    pub c: f64,
    pub x_final: Vec<f64>,
    pub divergence: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub gradient: Vec<f64>,
    pub kt: KtSummary,
    pub config: ConfigEcho,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian: Option<Spectrum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proviso_monotone: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<Vec<RunSummary>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<bool>,
}

impl Report {
    pub fn from_run(run: &RunResult, y: &Observations, cfg: &SolverConfig) -> Self {
        Report {
            m: y.m(),
            c: y.c(),
            x_final: run.x_final.as_slice().to_vec(),
            divergence: run.divergence,
            iterations: run.iterations,
            stop_reason: run.stop_reason,
            gradient: run.gradient.clone(),
            kt: KtSummary {
                status: run.kt.status.clone(),
                pass: run.kt.pass,
            },
            config: ConfigEcho {
                solver: cfg.clone(),
                rng: RNG_ID.to_string(),
            },
            seed: run.seed,
            hessian: run.hessian_spectrum,
            proviso_monotone: run.proviso_monotone,
            runs: None,
            best_index: None,
            agreement: None,
            disagreement: None,
        }
    }

    pub fn from_multi(res: &MultiStartResult, y: &Observations, cfg: &SolverConfig) -> Self {
        Report {
            runs: Some(res.runs.iter().map(RunSummary::from).collect()),
            best_index: Some(res.best_index),
            agreement: Some(res.agreement),
            disagreement: Some(res.disagreement),
            ..Report::from_run(res.best(), y, cfg)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    write_atomic(path, report.to_json().as_bytes())
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        parse_error(path, format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

pub const TRACE_HEADER: &str = "t,divergence,step_div,step_l1";

/// Renders the trace as CSV; `x0..xm` columns appear when every record
/// carries a snapshot.
pub fn trace_to_csv(trace: &[IterationRecord]) -> String {
    let with_x = !trace.is_empty() && trace.iter().all(|r| r.x_snapshot.is_some());
    let mut out = String::from(TRACE_HEADER);
    if with_x {
        let n = trace[0].x_snapshot.as_ref().map_or(0, |s| s.len());
        for j in 0..n {
            out.push_str(&format!(",x{j}"));
        }
    }
    out.push('\n');
    for r in trace {
        out.push_str(&format!("{},{},{},{}", r.t, r.divergence, r.step_div, r.step_l1));
        if let (true, Some(x)) = (with_x, &r.x_snapshot) {
            for v in x.as_slice() {
                out.push_str(&format!(",{v}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_trace(trace: &[IterationRecord], path: &Path) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::usage("cannot write an empty trace"));
    }
    write_atomic(path, trace_to_csv(trace).as_bytes())
}
