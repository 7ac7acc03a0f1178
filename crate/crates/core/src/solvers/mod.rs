//! Minimizers for [`QuboPolynomial`]s.
//!
//! Every backend is deterministic given the polynomial, the configuration and
//! the seed, independent of the number of worker threads. The thread count is
//! capped by the `QUBOROUTER_THREADS` environment variable.

pub mod anneal;
pub mod exact;
pub mod qaoa;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::{QuboError, QuboPolynomial};
use crate::scalar::approx_eq;
use crate::Scalar;

pub use anneal::solve_anneal;
pub use exact::solve_exact;
pub use qaoa::{solve_qaoa, QaoaSimulator};

/// Environment variable read by [`with_thread_cap`].
pub const THREADS_ENV: &str = "QUBOROUTER_THREADS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{backend} backend handles at most {max} variables, got {n}")]
    TooManyVariables { backend: Backend, n: usize, max: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Anneal,
    Qaoa,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Anneal => "anneal",
            Backend::Qaoa => "qaoa",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealConfig {
    pub sweeps: usize,
    pub restarts: usize,
    /// Starting temperature; defaults to the largest absolute coefficient.
    #[serde(default)]
    pub t_hi: Option<f64>,
    /// Final temperature; defaults to 1e-3 times the smallest nonzero one.
    #[serde(default)]
    pub t_lo: Option<f64>,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            sweeps: 1000,
            restarts: 20,
            t_hi: None,
            t_lo: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaConfig {
    /// Number of layers.
    pub depth: usize,
    /// Points per axis of the `[0, π]²` grid searched for the first layer.
    pub grid: usize,
    /// Rounds of coordinate descent over all angles at each depth.
    pub descent_iters: usize,
    /// Measurements sampled from the final state.
    pub shots: usize,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        QaoaConfig {
            depth: 1,
            grid: 32,
            descent_iters: 50,
            shots: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub backend: Backend,
    pub seed: u64,
    #[serde(default)]
    pub anneal: AnnealConfig,
    #[serde(default)]
    pub qaoa: QaoaConfig,
}

impl SolveConfig {
    pub fn new(backend: Backend) -> Self {
        SolveConfig {
            backend,
            seed: 0,
            anneal: AnnealConfig::default(),
            qaoa: QaoaConfig::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Final state of a QAOA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaSummary<T> {
    pub betas: Vec<T>,
    pub gammas: Vec<T>,
    /// `⟨C⟩` in the final state.
    pub expectation: T,
    /// Smallest value of the polynomial over all bitstrings.
    pub ground_value: T,
    /// Probability of measuring a bitstring with the ground value.
    pub ground_probability: T,
    pub shots: usize,
    /// How many shots landed on a ground-value bitstring.
    pub ground_hits: usize,
}

/// Per-restart results of an annealing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSummary<T> {
    /// Lowest value seen along each restart's trajectory.
    pub restart_minima: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<T> {
    pub backend: Backend,
    pub seed: u64,
    /// Best assignment, variable 0 first.
    pub bits: Vec<bool>,
    /// The polynomial evaluated at `bits`.
    pub value: T,
    /// Seconds spent; the only field that differs between identical runs.
    pub wall_time: f64,
    pub anneal: Option<AnnealSummary<T>>,
    pub qaoa: Option<QaoaSummary<T>>,
}

/// Runs the backend selected by `cfg` inside a thread pool capped by
/// [`THREADS_ENV`].
pub fn solve<T: Scalar>(p: &QuboPolynomial<T>, cfg: &SolveConfig) -> Result<SolveReport<T>, SolveError> {
    with_thread_cap(|| match cfg.backend {
        Backend::Exact => solve_exact(p),
        Backend::Anneal => solve_anneal(p, cfg),
        Backend::Qaoa => solve_qaoa(p, cfg),
    })
}

/// Runs `f` on a pool with at most `QUBOROUTER_THREADS` workers, or on the
/// global pool when the variable is unset or unparsable.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    match cap.filter(|&n| n > 0) {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool: {e}");
                f()
            }
        },
        None => f(),
    }
}

/// Adjacency form of a polynomial for incremental evaluation.
#[derive(Debug, Clone)]
pub(crate) struct Sparse<T> {
    pub n: usize,
    pub constant: T,
    pub linear: Vec<T>,
    pub neighbours: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> Sparse<T> {
    pub fn new(p: &QuboPolynomial<T>) -> Self {
        let n = p.num_vars();
        let mut linear = vec![T::zero(); n];
        for (&i, &c) in p.linear() {
            linear[i] = c;
        }
        let mut neighbours = vec![Vec::new(); n];
        for (&(i, j), &c) in p.quadratic() {
            neighbours[i].push((j, c));
            neighbours[j].push((i, c));
        }
        Sparse {
            n,
            constant: p.constant(),
            linear,
            neighbours,
        }
    }

    pub fn value(&self, x: &[bool]) -> T {
        let mut v = self.constant;
        for i in (0..self.n).filter(|&i| x[i]) {
            v += self.linear[i];
            for &(j, c) in &self.neighbours[i] {
                if j > i && x[j] {
                    v += c;
                }
            }
        }
        v
    }

    /// `∂C/∂x_i` at `x`: the change from setting `x_i` to one minus setting it to zero.
    pub fn fields(&self, x: &[bool]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let mut f = self.linear[i];
                for &(j, c) in &self.neighbours[i] {
                    if x[j] {
                        f += c;
                    }
                }
                f
            })
            .collect()
    }

    /// Flips `x_i`, updating `fields`, and returns the value change.
    pub fn flip(&self, i: usize, x: &mut [bool], fields: &mut [T]) -> T {
        let delta = if x[i] { -fields[i] } else { fields[i] };
        x[i] = !x[i];
        for &(j, c) in &self.neighbours[i] {
            if x[i] {
                fields[j] += c;
            } else {
                fields[j] -= c;
            }
        }
        delta
    }
}

/// Whether bitstring `a` comes before `b` reading variable 0 first.
pub(crate) fn lex_less(a: &[bool], b: &[bool]) -> bool {
    a < b
}

/// Picks the better of two candidates: lower value beyond the tolerance, then
/// the lexicographically smaller bitstring.
pub(crate) fn better<T: Scalar>(a: (T, &[bool]), b: (T, &[bool])) -> bool {
    if approx_eq(a.0, b.0, T::default_tolerance()) {
        lex_less(a.1, b.1)
    } else {
        a.0 < b.0
    }
}

pub(crate) fn finish<T: Scalar>(
    p: &QuboPolynomial<T>,
    backend: Backend,
    seed: u64,
    bits: Vec<bool>,
    started: Instant,
) -> Result<SolveReport<T>, SolveError> {
    let value = p.evaluate(&bits)?;
    Ok(SolveReport {
        backend,
        seed,
        bits,
        value,
        wall_time: started.elapsed().as_secs_f64(),
        anneal: None,
        qaoa: None,
    })
}
