//! File formats and pipeline steps behind the command line: compiled problem
//! files, solve reports, verification against classical oracles, instance
//! statistics and random graph generation.

pub mod gen;
pub mod problem;
pub mod stats;
pub mod verify;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::ExpansionError;
use crate::formulation::FormulationError;
use crate::graph::GraphError;
use crate::qubo::{bits_to_string, parse_bits, QuboError};
use crate::solvers::{AnnealSummary, Backend, QaoaSummary, SolveConfig, SolveError, SolveReport};

pub use problem::{Compiled, ProblemFile, ProblemSource};
pub use stats::{problem_stats, ProblemStats};
pub use verify::{verify, Status, Verdict};

pub const PROBLEM_FORMAT: &str = "quborouter-problem/1";
pub const REPORT_FORMAT: &str = "quborouter-report/1";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0} exists; pass --force to overwrite")]
    Exists(PathBuf),
    #[error("report was produced for problem {report}, but the problem file hashes to {problem}")]
    HashMismatch { problem: String, report: String },
    #[error("problem file is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl From<GraphError> for HarnessError {
    fn from(e: GraphError) -> Self {
        HarnessError::Formulation(e.into())
    }
}

impl From<ExpansionError> for HarnessError {
    fn from(e: ExpansionError) -> Self {
        HarnessError::Formulation(e.into())
    }
}

impl From<QuboError> for HarnessError {
    fn from(e: QuboError) -> Self {
        HarnessError::Formulation(e.into())
    }
}

pub fn read_text(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<D: DeserializeOwned>(path: &Path) -> Result<D, HarnessError> {
    serde_json::from_str(&read_text(path)?).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

/// Writes `text` to `path`, refusing to replace an existing file unless `force`.
pub fn write_output(path: &Path, text: &str, force: bool) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = if force {
        OpenOptions::new().write(true).create(true).truncate(true).open(path)
    } else {
        OpenOptions::new().write(true).create_new(true).open(path)
    }
    .map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            HarnessError::Exists(path.to_path_buf())
        } else {
            io(e)
        }
    })?;
    file.write_all(text.as_bytes()).map_err(io)
}

/// `report.json`: a [`SolveReport`] tied to its problem by content hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format: String,
    pub problem_hash: String,
    pub backend: Backend,
    pub seed: u64,
    pub config: SolveConfig,
    /// Best assignment as `0`/`1` text, variable 0 first.
    pub bits: String,
    pub value: f64,
    /// Seconds; excluded from reproducibility comparisons.
    pub wall_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anneal: Option<AnnealSummary<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qaoa: Option<QaoaSummary<f64>>,
}

impl ReportFile {
    pub fn new(problem_hash: &str, config: SolveConfig, r: SolveReport<f64>) -> Self {
        ReportFile {
            format: REPORT_FORMAT.to_string(),
            problem_hash: problem_hash.to_string(),
            backend: r.backend,
            seed: r.seed,
            config,
            bits: bits_to_string(&r.bits),
            value: r.value,
            wall_time: r.wall_time,
            anneal: r.anneal,
            qaoa: r.qaoa,
        }
    }

    pub fn assignment(&self) -> Result<Vec<bool>, HarnessError> {
        Ok(parse_bits(&self.bits)?)
    }

    /// The report with `wall_time` zeroed, for comparing runs.
    pub fn without_wall_time(&self) -> Self {
        ReportFile {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}

/// Solves a problem file and wraps the result.
pub fn solve_problem(problem: &ProblemFile, config: &SolveConfig) -> Result<ReportFile, HarnessError> {
    let poly = problem.polynomial()?;
    let report = crate::solvers::solve(&poly, config)?;
    Ok(ReportFile::new(&problem.hash, *config, report))
}
