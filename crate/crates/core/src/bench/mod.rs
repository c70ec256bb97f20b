//! Benchmark harness: suite manifests, the JSONL run log, suite execution
//! and the metric pipeline.

mod metrics;
mod report;
mod suite;

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::agents::{Outcome, PlanningTask, Status};
use crate::engine::EngineError;

pub use metrics::{
    compute_metrics, hard_case_analysis, median, plan_length_table, unsolved_by_all, ApproachSummary, BlockRow,
    DifficultyRow, HardCaseReport, MetricsOptions, PairwiseSolves, PlanLengthTable, SuiteReport,
};
pub use report::{render_hard_cases, render_plan_length_table, render_report};
pub use suite::{run_suite, NamedAdapter, PlannerFactory, SuiteOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Solved,
    Timeout,
    EarlyExit,
    HarnessError,
}

impl From<Status> for RecordStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Solved => RecordStatus::Solved,
            Status::Timeout => RecordStatus::Timeout,
            Status::EarlyExit => RecordStatus::EarlyExit,
        }
    }
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Position in the suite's instance order.
    pub instance: usize,
    #[serde(default)]
    pub name: String,
    pub approach: String,
    pub status: RecordStatus,
    /// Present exactly when `status` is solved.
    pub plan_length: Option<usize>,
    pub wall_time_s: f64,
    pub tokens_in: u64,
    pub tokens_out: u64,
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub failed_action_attempts: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    pub tokens_estimated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    /// Fields this crate does not interpret, kept on round trips.
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl RunRecord {
    pub fn from_outcome(instance: usize, name: &str, approach: &str, o: &Outcome) -> Self {
        RunRecord {
            instance,
            name: name.to_string(),
            approach: approach.to_string(),
            status: o.status.into(),
            plan_length: if o.status == Status::Solved { o.plan_length() } else { None },
            wall_time_s: o.wall_time,
            tokens_in: o.tokens_in,
            tokens_out: o.tokens_out,
            attempts: o.attempts,
            failed_action_attempts: o.failed_action_attempts,
            tokens_estimated: o.tokens_estimated,
            error: None,
            timestamp: Some(now()),
            extra: BTreeMap::new(),
        }
    }

    pub fn harness_error(instance: usize, name: &str, approach: &str, wall_time_s: f64, error: String) -> Self {
        RunRecord {
            instance,
            name: name.to_string(),
            approach: approach.to_string(),
            status: RecordStatus::HarnessError,
            plan_length: None,
            wall_time_s,
            tokens_in: 0,
            tokens_out: 0,
            attempts: 0,
            failed_action_attempts: 0,
            tokens_estimated: false,
            error: Some(error),
            timestamp: Some(now()),
            extra: BTreeMap::new(),
        }
    }

    pub fn tokens(&self) -> u64 {
        self.tokens_in + self.tokens_out
    }

    pub fn solved(&self) -> bool {
        self.status == RecordStatus::Solved
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("records do not cover the instance x approach grid; missing: {}", format_pairs(.missing))]
    NonRectangularGrid { missing: Vec<(usize, String)> },
    #[error("more than one record for instance {0} and approach {1}")]
    DuplicateRecord(usize, String),
    #[error("record for instance {instance} ({approach}): {message}")]
    Inconsistent { instance: usize, approach: String, message: String },
    #[error("unknown instance {0}")]
    UnknownInstance(usize),
    #[error("unknown approach `{0}`")]
    UnknownApproach(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn format_pairs(pairs: &[(usize, String)]) -> String {
    pairs
        .iter()
        .map(|(i, a)| format!("({i}, {a})"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn io_err(path: &Path, e: std::io::Error) -> BenchError {
    BenchError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Read every record. Blank lines are skipped.
pub fn read_log(path: &Path) -> Result<Vec<RunRecord>, BenchError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| BenchError::Format {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(r);
    }
    Ok(records)
}

/// Append-only JSONL log. Each record is flushed and synced when written.
#[derive(Debug)]
pub struct RunLog {
    path: PathBuf,
    file: File,
}

impl RunLog {
    /// Open for appending and return the records already present. A final
    /// line left incomplete by a crash is dropped.
    pub fn open(path: &Path) -> Result<(Self, Vec<RunRecord>), BenchError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let existing = match fs::read_to_string(path) {
            Ok(text) => {
                let complete = match text.rfind('\n') {
                    Some(i) => i + 1,
                    None => 0,
                };
                if complete < text.len() {
                    log::warn!("{}: dropping incomplete final line", path.display());
                    let f = OpenOptions::new().write(true).open(path).map_err(|e| io_err(path, e))?;
                    f.set_len(complete as u64).map_err(|e| io_err(path, e))?;
                }
                read_log(path)?
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(io_err(path, e)),
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok((
            RunLog {
                path: path.to_path_buf(),
                file,
            },
            existing,
        ))
    }

    pub fn append(&mut self, record: &RunRecord) -> Result<(), BenchError> {
        let mut line = serde_json::to_string(record).expect("record serialises");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|e| io_err(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

/// A suite manifest: one `domain problem` pair per line, `#` comments.
/// Relative paths resolve against the manifest's directory.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<(PathBuf, PathBuf)>, BenchError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [domain, problem] = cols.as_slice() else {
            return Err(BenchError::Format {
                path: base.display().to_string(),
                line: i + 1,
                message: format!("expected `domain problem`, got `{line}`"),
            });
        };
        out.push((base.join(domain), base.join(problem)));
    }
    Ok(out)
}

/// Load every task listed in a manifest file.
pub fn load_manifest(path: &Path) -> Result<Vec<PlanningTask>, BenchError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base)?
        .iter()
        .map(|(d, p)| PlanningTask::from_files(d, p).map_err(BenchError::from))
        .collect()
}
