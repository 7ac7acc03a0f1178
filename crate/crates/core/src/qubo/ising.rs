use std::collections::BTreeMap;

use super::QuboPolynomial;
use crate::Scalar;

/// Diagonal Hamiltonian in spin form, `offset + Σ h_i·s_i + Σ_{i<j} J_ij·s_i·s_j`
/// with `s_i = 1 - 2·x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    pub num_spins: usize,
    pub h: BTreeMap<usize, T>,
    pub j: BTreeMap<(usize, usize), T>,
    pub offset: T,
}

impl<T: Scalar> IsingModel<T> {
    /// Substitutes `x = (1 - s) / 2` into every term.
    pub fn from_qubo(p: &QuboPolynomial<T>) -> Self {
        let half = T::from_f64_lossy(0.5);
        let quarter = T::from_f64_lossy(0.25);
        let mut h: BTreeMap<usize, T> = BTreeMap::new();
        let mut j = BTreeMap::new();
        let mut offset = p.constant();
        for (&i, &a) in p.linear() {
            offset += a * half;
            *h.entry(i).or_insert_with(T::zero) -= a * half;
        }
        for (&(i, k), &b) in p.quadratic() {
            offset += b * quarter;
            *h.entry(i).or_insert_with(T::zero) -= b * quarter;
            *h.entry(k).or_insert_with(T::zero) -= b * quarter;
            j.insert((i, k), b * quarter);
        }
        h.retain(|_, v| *v != T::zero());
        IsingModel {
            num_spins: p.num_vars(),
            h,
            j,
            offset,
        }
    }

    /// Energy for spins given as `+1`/`-1`.
    pub fn energy(&self, spins: &[i8]) -> T {
        let s = |i: usize| if spins[i] >= 0 { T::one() } else { -T::one() };
        let mut e = self.offset;
        for (&i, &v) in &self.h {
            e += v * s(i);
        }
        for (&(i, k), &v) in &self.j {
            e += v * s(i) * s(k);
        }
        e
    }

    /// Energy of the spin configuration corresponding to bits `x`.
    pub fn energy_of_bits(&self, x: &[bool]) -> T {
        let spins: Vec<i8> = x.iter().map(|&b| if b { -1 } else { 1 }).collect();
        self.energy(&spins)
    }
}
