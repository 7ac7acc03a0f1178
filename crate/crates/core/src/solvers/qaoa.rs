//! Statevector simulation of the quantum approximate optimization algorithm.
//!
//! Basis state `x` assigns bit `i` of `x` to variable `i`. Starting from the
//! uniform superposition, layer `k` multiplies each amplitude by
//! `exp(-i·γ_k·C(x))` and then rotates every qubit by
//! `exp(-i·β_k·X) = [[cos β, -i sin β], [-i sin β, cos β]]`.
//!
//! The angles minimize `⟨C⟩`: a grid over `[0, π]²` for the first layer, then
//! coordinate descent over all angles, adding one layer at a time.

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qubo::QuboPolynomial;
use crate::Scalar;

use super::{better, finish, Backend, QaoaSummary, SolveConfig, SolveError, SolveReport, Sparse};

/// Largest variable count accepted.
pub const MAX_QAOA_VARS: usize = 22;

/// Amplitudes per block in parallel loops and sums. Fixed so that the order of
/// floating point additions does not depend on the thread count.
const CHUNK: usize = 1 << 12;

/// Diagonal of the cost operator plus the operations of one circuit.
#[derive(Debug, Clone)]
pub struct QaoaSimulator<T> {
    n: usize,
    costs: Vec<T>,
    ground: T,
    /// Largest absolute coefficient, or one for a constant polynomial.
    gamma_scale: T,
}

impl<T: Scalar> QaoaSimulator<T> {
    pub fn new(p: &QuboPolynomial<T>) -> Result<Self, SolveError> {
        let n = p.num_vars();
        if n > MAX_QAOA_VARS {
            return Err(SolveError::TooManyVariables {
                backend: Backend::Qaoa,
                n,
                max: MAX_QAOA_VARS,
            });
        }
        let s = Sparse::new(p);
        let mut costs = vec![T::zero(); 1 << n];
        costs[0] = s.constant;
        for i in 0..n {
            let (lo, hi) = costs.split_at_mut(1 << i);
            let lower: Vec<(usize, T)> = s.neighbours[i].iter().copied().filter(|&(j, _)| j < i).collect();
            let lin = s.linear[i];
            hi[..1 << i].par_iter_mut().enumerate().for_each(|(x, out)| {
                let mut v = lo[x] + lin;
                for &(j, c) in &lower {
                    if x >> j & 1 == 1 {
                        v += c;
                    }
                }
                *out = v;
            });
        }
        let ground = costs.iter().copied().fold(T::infinity(), T::min);
        let m = p.max_abs_coefficient();
        let gamma_scale = if m > T::zero() { m } else { T::one() };
        Ok(QaoaSimulator {
            n,
            costs,
            ground,
            gamma_scale,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// `C(x)` for every basis state.
    pub fn costs(&self) -> &[T] {
        &self.costs
    }

    pub fn ground_value(&self) -> T {
        self.ground
    }

    pub fn uniform(&self) -> Vec<Complex<T>> {
        let a = T::one() / T::of_usize(self.costs.len()).sqrt();
        vec![Complex::new(a, T::zero()); self.costs.len()]
    }

    pub fn phase(&self, state: &mut [Complex<T>], gamma: T) {
        state
            .par_chunks_mut(CHUNK)
            .zip(self.costs.par_chunks(CHUNK))
            .for_each(|(amps, costs)| {
                for (a, &c) in amps.iter_mut().zip(costs) {
                    *a *= Complex::from_polar(T::one(), -gamma * c);
                }
            });
    }

    pub fn mix(&self, state: &mut [Complex<T>], beta: T) {
        let (s, c) = beta.sin_cos();
        for q in 0..self.n {
            let half = 1usize << q;
            let block = half * 2;
            if half >= CHUNK {
                for blk in state.chunks_mut(block) {
                    let (lo, hi) = blk.split_at_mut(half);
                    lo.par_chunks_mut(CHUNK)
                        .zip(hi.par_chunks_mut(CHUNK))
                        .for_each(|(a, b)| rotate(a, b, c, s));
                }
            } else {
                state.par_chunks_mut(CHUNK.max(block)).for_each(|big| {
                    for blk in big.chunks_mut(block) {
                        let (lo, hi) = blk.split_at_mut(half);
                        rotate(lo, hi, c, s);
                    }
                });
            }
        }
    }

    /// One phase step followed by one mixing step.
    pub fn layer(&self, state: &mut [Complex<T>], beta: T, gamma: T) {
        self.phase(state, gamma);
        self.mix(state, beta);
    }

    /// Final state for the given angles, one pair per layer.
    pub fn evolve(&self, betas: &[T], gammas: &[T]) -> Vec<Complex<T>> {
        let mut state = self.uniform();
        for (&b, &g) in betas.iter().zip(gammas) {
            self.layer(&mut state, b, g);
        }
        state
    }

    pub fn norm_squared(&self, state: &[Complex<T>]) -> T {
        chunked_sum(state, |_, a| a.norm_sqr())
    }

    /// `Σ_x |a_x|²·C(x)`.
    pub fn expectation(&self, state: &[Complex<T>]) -> T {
        chunked_sum(state, |x, a| a.norm_sqr() * self.costs[x])
    }

    /// Probability mass on basis states whose cost equals the ground value.
    pub fn ground_probability(&self, state: &[Complex<T>]) -> T {
        let tol = T::default_tolerance() * (T::one() + self.ground.abs());
        chunked_sum(state, |x, a| {
            if self.costs[x] <= self.ground + tol {
                a.norm_sqr()
            } else {
                T::zero()
            }
        })
    }

    fn energy(&self, angles: &[T]) -> T {
        let (betas, gammas): (Vec<T>, Vec<T>) = angles.chunks(2).map(|p| (p[0], p[1])).unzip();
        self.expectation(&self.evolve(&betas, &gammas))
    }
}

fn rotate<T: Scalar>(lo: &mut [Complex<T>], hi: &mut [Complex<T>], c: T, s: T) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        // -i·s·z = s·(z.im, -z.re)
        *a = x * c + Complex::new(s * y.im, -s * y.re);
        *b = y * c + Complex::new(s * x.im, -s * x.re);
    }
}

fn chunked_sum<T: Scalar>(state: &[Complex<T>], f: impl Fn(usize, Complex<T>) -> T + Sync) -> T {
    let parts: Vec<T> = state
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(k, chunk)| {
            let base = k * CHUNK;
            chunk.iter().enumerate().map(|(i, &a)| f(base + i, a)).sum()
        })
        .collect();
    parts.into_iter().sum()
}

/// `k·π/(points-1)` for `k = 0..points`.
fn grid_axis<T: Scalar>(points: usize) -> Vec<T> {
    if points <= 1 {
        return vec![T::zero()];
    }
    (0..points)
        .map(|k| T::PI() * T::of_usize(k) / T::of_usize(points - 1))
        .collect()
}

/// Angles `[β_1, γ_1, …, β_p, γ_p]` minimizing `⟨C⟩`.
///
/// The search runs over `γ·s`, where `s` is the largest absolute coefficient,
/// so the grid spans the same phase range whatever the penalty size. Returned
/// angles are unscaled.
pub fn optimize_angles<T: Scalar>(sim: &QaoaSimulator<T>, depth: usize, grid: usize, iters: usize) -> Vec<T> {
    if depth == 0 {
        return Vec::new();
    }
    let scale = sim.gamma_scale;
    let energy = |a: &[T]| {
        let raw: Vec<T> = a.iter().enumerate().map(|(i, &x)| if i % 2 == 1 { x / scale } else { x }).collect();
        sim.energy(&raw)
    };
    let axis = grid_axis::<T>(grid);
    let cells: Vec<(T, T)> = axis.iter().flat_map(|&b| axis.iter().map(move |&g| (b, g))).collect();
    let energies: Vec<T> = cells.par_iter().map(|&(b, g)| energy(&[b, g])).collect();
    let mut pick = 0;
    for k in 1..cells.len() {
        if energies[k] < energies[pick] {
            pick = k;
        }
    }
    let mut angles = vec![cells[pick].0, cells[pick].1];
    let step = T::PI() / T::of_usize(2 * grid.max(2));
    descend(&energy, &mut angles, step, iters);
    for _ in 1..depth {
        angles.extend([T::zero(), T::zero()]);
        descend(&energy, &mut angles, step, iters);
    }
    for g in angles.iter_mut().skip(1).step_by(2) {
        *g /= scale;
    }
    angles
}

/// Coordinate descent: try `±step` on each angle, halve the step when no move helps.
fn descend<T: Scalar>(energy: &impl Fn(&[T]) -> T, angles: &mut [T], mut step: T, iters: usize) {
    let mut best = energy(angles);
    let floor = T::from_f64_lossy(1e-7);
    for _ in 0..iters {
        let mut moved = false;
        for i in 0..angles.len() {
            for dir in [T::one(), -T::one()] {
                let old = angles[i];
                angles[i] = old + dir * step;
                let e = energy(angles);
                if e < best {
                    best = e;
                    moved = true;
                    break;
                }
                angles[i] = old;
            }
        }
        if !moved {
            step /= T::one() + T::one();
            if step < floor {
                break;
            }
        }
    }
}

pub fn solve_qaoa<T: Scalar>(p: &QuboPolynomial<T>, cfg: &SolveConfig) -> Result<SolveReport<T>, SolveError> {
    let started = Instant::now();
    let q = cfg.qaoa;
    let sim = QaoaSimulator::new(p)?;
    let angles = optimize_angles(&sim, q.depth, q.grid, q.descent_iters);
    let (betas, gammas): (Vec<T>, Vec<T>) = angles.chunks(2).map(|a| (a[0], a[1])).unzip();
    let state = sim.evolve(&betas, &gammas);
    let probs: Vec<f64> = state.iter().map(|a| a.norm_sqr().to_f64_lossy()).collect();

    let n = sim.num_qubits();
    let tol = T::default_tolerance() * (T::one() + sim.ground.abs());
    let bits_of = |x: usize| -> Vec<bool> { (0..n).map(|i| x >> i & 1 == 1).collect() };
    let mut ground_hits = 0;
    let best_state = if q.shots == 0 {
        // Most probable state, smallest index on ties.
        let mut arg = 0;
        for x in 1..probs.len() {
            if probs[x] > probs[arg] {
                arg = x;
            }
        }
        arg
    } else {
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &pr in &probs {
            acc += pr;
            cdf.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut best: Option<(usize, Vec<bool>)> = None;
        for _ in 0..q.shots {
            let u = rng.gen::<f64>() * acc;
            let x = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
            if sim.costs[x] <= sim.ground + tol {
                ground_hits += 1;
            }
            let bx = bits_of(x);
            let take = match &best {
                None => true,
                Some((y, by)) => better((sim.costs[x], &bx), (sim.costs[*y], by)),
            };
            if take {
                best = Some((x, bx));
            }
        }
        best.expect("at least one shot").0
    };

    let mut report = finish(p, Backend::Qaoa, cfg.seed, bits_of(best_state), started)?;
    report.qaoa = Some(QaoaSummary {
        expectation: sim.expectation(&state),
        ground_value: sim.ground,
        ground_probability: sim.ground_probability(&state),
        betas,
        gammas,
        shots: q.shots,
        ground_hits,
    });
    Ok(report)
}
