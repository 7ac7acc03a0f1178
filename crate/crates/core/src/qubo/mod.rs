//! Quadratic polynomials over binary variables.

mod io;
mod ising;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::graph::WeightedDigraph;
use crate::Scalar;

pub use io::{content_hash, QuboDocument};
pub use ising::IsingModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("bitstring has length {got}, polynomial has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("duplicate variable name {0:?}")]
    DuplicateName(String),
    #[error("malformed QUBO document: {0}")]
    Malformed(String),
    #[error("penalty must be positive and finite, got {0}")]
    InvalidPenalty(f64),
}

/// Penalty magnitude applied to every constraint family of one compilation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Penalty<T>(T);

impl<T: Scalar> Penalty<T> {
    pub fn new(value: T) -> Result<Self, QuboError> {
        if value > T::zero() && value.is_finite() {
            Ok(Penalty(value))
        } else {
            Err(QuboError::InvalidPenalty(value.to_f64_lossy()))
        }
    }

    /// Sum of all arc weights plus one.
    pub fn default_for(g: &WeightedDigraph<T>) -> Self {
        Penalty(g.total_weight() + T::one())
    }

    pub fn value(self) -> T {
        self.0
    }

    /// Whether this penalty exceeds the total arc weight of `g`.
    pub fn guards(self, g: &WeightedDigraph<T>) -> bool {
        self.0 > g.total_weight()
    }
}

/// Shorthand for [`Penalty::default_for`].
pub fn default_penalty<T: Scalar>(g: &WeightedDigraph<T>) -> Penalty<T> {
    Penalty::default_for(g)
}

/// A variable that is either free or already fixed to a bit.
///
/// Formulations that pin variables build their terms from literals so the
/// fixed ones fold into lower-order coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Literal {
    Fixed(bool),
    Var(usize),
}

/// `constant + Σ linear[i]·x_i + Σ_{i<j} quadratic[(i,j)]·x_i·x_j`
#[derive(Debug, Clone, PartialEq)]
pub struct QuboPolynomial<T> {
    constant: T,
    linear: BTreeMap<usize, T>,
    quadratic: BTreeMap<(usize, usize), T>,
    names: Vec<String>,
    name_index: HashMap<String, usize>,
}

impl<T: Scalar> Default for QuboPolynomial<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> QuboPolynomial<T> {
    pub fn new() -> Self {
        Self {
            constant: T::zero(),
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            names: Vec::new(),
            name_index: HashMap::new(),
        }
    }

    /// Polynomial over `n` variables named `x0 .. x{n-1}`, all coefficients zero.
    pub fn with_vars(n: usize) -> Self {
        let mut p = Self::new();
        for i in 0..n {
            p.add_variable(format!("x{i}")).unwrap();
        }
        p
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> Result<usize, QuboError> {
        let name = name.into();
        if self.name_index.contains_key(&name) {
            return Err(QuboError::DuplicateName(name));
        }
        let id = self.names.len();
        self.name_index.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn linear(&self) -> &BTreeMap<usize, T> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), T> {
        &self.quadratic
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn var_by_name(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn linear_coeff(&self, i: usize) -> T {
        self.linear.get(&i).copied().unwrap_or_else(T::zero)
    }

    pub fn quadratic_coeff(&self, i: usize, j: usize) -> T {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or_else(T::zero)
    }

    fn check(&self, i: usize) {
        assert!(
            i < self.num_vars(),
            "variable index {i} out of range for {} variables",
            self.num_vars()
        );
    }

    pub fn add_constant(&mut self, c: T) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, i: usize, c: T) {
        self.check(i);
        if c == T::zero() {
            return;
        }
        let e = self.linear.entry(i).or_insert_with(T::zero);
        *e += c;
        if *e == T::zero() {
            self.linear.remove(&i);
        }
    }

    /// Adds `c·x_i·x_j`; `i == j` folds into the linear term since `x² = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) {
        self.check(i);
        self.check(j);
        if i == j {
            return self.add_linear(i, c);
        }
        if c == T::zero() {
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        let e = self.quadratic.entry(key).or_insert_with(T::zero);
        *e += c;
        if *e == T::zero() {
            self.quadratic.remove(&key);
        }
    }

    /// Adds `scale·(Σ coeff_k·x_k + offset)²`, expanded with `x² = x`.
    ///
    /// Repeated indices in `terms` are merged before expansion.
    pub fn add_squared_linear(&mut self, terms: &[(usize, T)], offset: T, scale: T) {
        self.add_affine_product(terms, offset, terms, offset, scale);
    }

    /// Adds `scale·(Σ a_k·x_k + a_off)·(Σ b_k·x_k + b_off)`.
    pub fn add_affine_product(&mut self, a: &[(usize, T)], a_off: T, b: &[(usize, T)], b_off: T, scale: T) {
        let a = merge_terms(a);
        let b = merge_terms(b);
        self.add_constant(scale * a_off * b_off);
        for &(i, ci) in &a {
            self.add_linear(i, scale * ci * b_off);
        }
        for &(j, cj) in &b {
            self.add_linear(j, scale * cj * a_off);
        }
        for &(i, ci) in &a {
            for &(j, cj) in &b {
                self.add_quadratic(i, j, scale * ci * cj);
            }
        }
    }

    /// `add_squared_linear` over literals; fixed literals fold into the offset.
    pub fn add_squared_literals(&mut self, terms: &[(Literal, T)], offset: T, scale: T) {
        let (vars, offset) = split_literals(terms, offset);
        self.add_squared_linear(&vars, offset, scale);
    }

    /// `add_affine_product` over literals.
    pub fn add_literal_affine_product(
        &mut self,
        a: &[(Literal, T)],
        a_off: T,
        b: &[(Literal, T)],
        b_off: T,
        scale: T,
    ) {
        let (a, a_off) = split_literals(a, a_off);
        let (b, b_off) = split_literals(b, b_off);
        self.add_affine_product(&a, a_off, &b, b_off, scale);
    }

    /// Adds `c·a·b` for two literals.
    pub fn add_literal_product(&mut self, a: Literal, b: Literal, c: T) {
        match (a, b) {
            (Literal::Fixed(false), _) | (_, Literal::Fixed(false)) => {}
            (Literal::Fixed(true), Literal::Fixed(true)) => self.add_constant(c),
            (Literal::Fixed(true), Literal::Var(i)) | (Literal::Var(i), Literal::Fixed(true)) => self.add_linear(i, c),
            (Literal::Var(i), Literal::Var(j)) => self.add_quadratic(i, j, c),
        }
    }

    /// Adds `c·a` for a literal.
    pub fn add_literal(&mut self, a: Literal, c: T) {
        self.add_literal_product(a, Literal::Fixed(true), c);
    }

    /// Coefficient-wise sum. Both polynomials must have the same variable count;
    /// names are taken from `self`.
    pub fn add_assign_poly(&mut self, other: &QuboPolynomial<T>) {
        assert_eq!(self.num_vars(), other.num_vars(), "variable counts differ");
        self.add_constant(other.constant);
        for (&i, &c) in &other.linear {
            self.add_linear(i, c);
        }
        for (&(i, j), &c) in &other.quadratic {
            self.add_quadratic(i, j, c);
        }
    }

    /// Appends all variables of `other` (names unchanged) and its terms,
    /// shifted by the current variable count. Returns the shift.
    pub fn append(&mut self, other: &QuboPolynomial<T>) -> Result<usize, QuboError> {
        let shift = self.num_vars();
        for name in &other.names {
            self.add_variable(name.clone())?;
        }
        self.add_constant(other.constant);
        for (&i, &c) in &other.linear {
            self.add_linear(i + shift, c);
        }
        for (&(i, j), &c) in &other.quadratic {
            self.add_quadratic(i + shift, j + shift, c);
        }
        Ok(shift)
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<T, QuboError> {
        if x.len() != self.num_vars() {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars(),
                got: x.len(),
            });
        }
        Ok(self.evaluate_unchecked(|i| x[i]))
    }

    /// Evaluates with variable `i` read from bit `i` of `state`.
    pub fn evaluate_state(&self, state: u64) -> T {
        self.evaluate_unchecked(|i| state >> i & 1 == 1)
    }

    fn evaluate_unchecked(&self, bit: impl Fn(usize) -> bool) -> T {
        let mut v = self.constant;
        for (&i, &c) in &self.linear {
            if bit(i) {
                v += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bit(i) && bit(j) {
                v += c;
            }
        }
        v
    }

    pub fn to_ising(&self) -> IsingModel<T> {
        IsingModel::from_qubo(self)
    }

    /// Largest absolute coefficient over linear and quadratic terms.
    pub fn max_abs_coefficient(&self) -> T {
        self.coefficients().map(|c| c.abs()).fold(T::zero(), T::max)
    }

    /// Smallest nonzero absolute coefficient, if any term exists.
    pub fn min_abs_nonzero_coefficient(&self) -> Option<T> {
        self.coefficients()
            .map(|c| c.abs())
            .filter(|c| *c > T::zero())
            .fold(None, |acc: Option<T>, c| Some(acc.map_or(c, |a| a.min(c))))
    }

    fn coefficients(&self) -> impl Iterator<Item = T> + '_ {
        self.linear.values().chain(self.quadratic.values()).copied()
    }

    pub fn cast<U: Scalar>(&self) -> QuboPolynomial<U> {
        let conv = |c: T| U::from_f64_lossy(c.to_f64_lossy());
        QuboPolynomial {
            constant: conv(self.constant),
            linear: self.linear.iter().map(|(&k, &c)| (k, conv(c))).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, conv(c))).collect(),
            names: self.names.clone(),
            name_index: self.name_index.clone(),
        }
    }
}

fn merge_terms<T: Scalar>(terms: &[(usize, T)]) -> Vec<(usize, T)> {
    let mut merged: BTreeMap<usize, T> = BTreeMap::new();
    for &(i, c) in terms {
        *merged.entry(i).or_insert_with(T::zero) += c;
    }
    merged.into_iter().filter(|(_, c)| *c != T::zero()).collect()
}

fn split_literals<T: Scalar>(terms: &[(Literal, T)], mut offset: T) -> (Vec<(usize, T)>, T) {
    let mut vars = Vec::with_capacity(terms.len());
    for &(lit, c) in terms {
        match lit {
            Literal::Fixed(true) => offset += c,
            Literal::Fixed(false) => {}
            Literal::Var(i) => vars.push((i, c)),
        }
    }
    (vars, offset)
}

/// Bits of `state` as a vector, variable 0 first.
pub fn state_to_bits(state: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| state >> i & 1 == 1).collect()
}

pub fn bits_to_state(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| if b { acc | 1 << i } else { acc })
}

/// `"0101…"` text form, variable 0 first.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>, QuboError> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(QuboError::Malformed(format!("bitstring contains {other:?}"))),
        })
        .collect()
}
