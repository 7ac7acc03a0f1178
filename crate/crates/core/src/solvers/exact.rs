//! Exhaustive minimization by Gray-code enumeration.
//!
//! The assignments are split on their highest bits into a fixed number of
//! blocks, scanned in parallel. Each block starts from an exactly evaluated
//! assignment and walks the remaining bits in Gray-code order with one flip per
//! step. Blocks are merged in order, so the result does not depend on the
//! number of threads.

use std::time::Instant;

use rayon::prelude::*;

use crate::qubo::QuboPolynomial;
use crate::Scalar;

use super::{better, finish, Backend, SolveError, SolveReport, Sparse};

/// Largest variable count accepted.
pub const MAX_EXACT_VARS: usize = 26;

const BLOCK_BITS: usize = 6;

pub fn solve_exact<T: Scalar>(p: &QuboPolynomial<T>) -> Result<SolveReport<T>, SolveError> {
    let started = Instant::now();
    let n = p.num_vars();
    if n > MAX_EXACT_VARS {
        return Err(SolveError::TooManyVariables {
            backend: Backend::Exact,
            n,
            max: MAX_EXACT_VARS,
        });
    }
    let s = Sparse::new(p);
    let high = BLOCK_BITS.min(n);
    let low = n - high;
    let blocks: Vec<(T, Vec<bool>)> = (0..1u64 << high)
        .into_par_iter()
        .map(|prefix| scan_block(&s, prefix, low))
        .collect();
    let mut best: Option<(T, Vec<bool>)> = None;
    for (v, x) in blocks {
        if best.as_ref().is_none_or(|(bv, bx)| better((v, &x), (*bv, bx))) {
            best = Some((v, x));
        }
    }
    let (_, bits) = best.expect("at least one block");
    finish(p, Backend::Exact, 0, bits, started)
}

/// Best assignment whose bits `low..n` spell `prefix`.
fn scan_block<T: Scalar>(s: &Sparse<T>, prefix: u64, low: usize) -> (T, Vec<bool>) {
    let n = s.n;
    let mut x: Vec<bool> = (0..n).map(|i| i >= low && prefix >> (i - low) & 1 == 1).collect();
    let mut fields = s.fields(&x);
    let mut value = s.value(&x);
    let mut best = (value, x.clone());
    for g in 1..(1u64 << low) {
        let k = g.trailing_zeros() as usize;
        value += s.flip(k, &mut x, &mut fields);
        if better((value, &x), (best.0, &best.1)) {
            best = (value, x.clone());
        }
    }
    // Re-evaluate to drop the drift accumulated by the incremental updates.
    best.0 = s.value(&best.1);
    best
}
