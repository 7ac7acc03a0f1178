//! Simulated annealing with single-bit Metropolis moves.
//!
//! Temperatures fall geometrically from `t_hi` to `t_lo` over the sweeps; each
//! sweep proposes a flip of every variable in index order. Restarts run in
//! parallel, each with its own ChaCha stream of the configured seed.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qubo::QuboPolynomial;
use crate::Scalar;

use super::{better, finish, AnnealSummary, Backend, SolveConfig, SolveError, SolveReport, Sparse};

/// `(t_hi, t_lo)` for `p` under `cfg`, with the scale-aware defaults.
pub fn schedule_bounds<T: Scalar>(p: &QuboPolynomial<T>, t_hi: Option<f64>, t_lo: Option<f64>) -> (f64, f64) {
    let hi = t_hi.unwrap_or_else(|| p.max_abs_coefficient().to_f64_lossy());
    let lo = t_lo.unwrap_or_else(|| 1e-3 * p.min_abs_nonzero_coefficient().map_or(0.0, |c| c.to_f64_lossy()));
    (hi, lo)
}

/// Temperature of sweep `s` out of `sweeps`.
pub fn temperature(s: usize, sweeps: usize, hi: f64, lo: f64) -> f64 {
    if sweeps <= 1 {
        return lo;
    }
    hi * (lo / hi).powf(s as f64 / (sweeps - 1) as f64)
}

pub fn solve_anneal<T: Scalar>(p: &QuboPolynomial<T>, cfg: &SolveConfig) -> Result<SolveReport<T>, SolveError> {
    let started = Instant::now();
    let a = cfg.anneal;
    if a.restarts == 0 {
        return Err(SolveError::InvalidConfig("restarts must be at least 1".into()));
    }
    let (hi, lo) = schedule_bounds(p, a.t_hi, a.t_lo);
    if a.sweeps > 0 && p.num_vars() > 0 && hi > 0.0 && !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(SolveError::InvalidConfig(format!(
            "temperatures must satisfy 0 < t_lo <= t_hi, got {lo} and {hi}"
        )));
    }
    let s = Sparse::new(p);
    let runs: Vec<(T, Vec<bool>)> = (0..a.restarts)
        .into_par_iter()
        .map(|r| run(&s, cfg.seed, r as u64, a.sweeps, hi, lo))
        .collect();
    let mut best = 0;
    for r in 1..runs.len() {
        if better((runs[r].0, &runs[r].1), (runs[best].0, &runs[best].1)) {
            best = r;
        }
    }
    let restart_minima = runs.iter().map(|r| r.0).collect();
    let bits = runs[best].1.clone();
    let mut report = finish(p, Backend::Anneal, cfg.seed, bits, started)?;
    report.anneal = Some(AnnealSummary { restart_minima });
    Ok(report)
}

/// One restart: random start, then the schedule. Returns the lowest point
/// visited, evaluated exactly.
fn run<T: Scalar>(s: &Sparse<T>, seed: u64, stream: u64, sweeps: usize, hi: f64, lo: f64) -> (T, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut x: Vec<bool> = (0..s.n).map(|_| rng.gen()).collect();
    let mut fields = s.fields(&x);
    let mut value = s.value(&x);
    let mut best = (value, x.clone());
    for sweep in 0..sweeps {
        let t = temperature(sweep, sweeps, hi, lo);
        for i in 0..s.n {
            let delta = if x[i] { -fields[i] } else { fields[i] };
            let d = delta.to_f64_lossy();
            let accept = d <= 0.0 || (t > 0.0 && rng.gen::<f64>() < (-d / t).exp());
            if accept {
                value += s.flip(i, &mut x, &mut fields);
                if value < best.0 {
                    best = (value, x.clone());
                }
            }
        }
    }
    best.0 = s.value(&best.1);
    (best.0, best.1)
}
