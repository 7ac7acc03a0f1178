use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{QuboError, QuboPolynomial};
use crate::Scalar;

/// JSON export form: `{"n", "constant", "linear": {"i": c}, "quadratic": {"i,j": c}, "names": {"i": name}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuboDocument {
    pub n: usize,
    pub constant: f64,
    pub linear: BTreeMap<String, f64>,
    pub quadratic: BTreeMap<String, f64>,
    pub names: BTreeMap<String, String>,
}

impl QuboDocument {
    pub fn from_polynomial<T: Scalar>(p: &QuboPolynomial<T>) -> Self {
        QuboDocument {
            n: p.num_vars(),
            constant: p.constant().to_f64_lossy(),
            linear: p
                .linear()
                .iter()
                .map(|(i, c)| (i.to_string(), c.to_f64_lossy()))
                .collect(),
            quadratic: p
                .quadratic()
                .iter()
                .map(|((i, j), c)| (format!("{i},{j}"), c.to_f64_lossy()))
                .collect(),
            names: p
                .names()
                .iter()
                .enumerate()
                .map(|(i, name)| (i.to_string(), name.clone()))
                .collect(),
        }
    }

    pub fn to_polynomial<T: Scalar>(&self) -> Result<QuboPolynomial<T>, QuboError> {
        let mut p = QuboPolynomial::new();
        if self.names.len() != self.n {
            return Err(QuboError::Malformed(format!(
                "{} names for {} variables",
                self.names.len(),
                self.n
            )));
        }
        for i in 0..self.n {
            let name = self
                .names
                .get(&i.to_string())
                .ok_or_else(|| QuboError::Malformed(format!("missing name for variable {i}")))?;
            p.add_variable(name.clone())?;
        }
        p.add_constant(T::from_f64_lossy(self.constant));
        for (k, &c) in &self.linear {
            let i = self.index(k)?;
            p.add_linear(i, T::from_f64_lossy(c));
        }
        for (k, &c) in &self.quadratic {
            let (a, b) = k
                .split_once(',')
                .ok_or_else(|| QuboError::Malformed(format!("quadratic key {k:?} is not \"i,j\"")))?;
            let (i, j) = (self.index(a)?, self.index(b)?);
            if i >= j {
                return Err(QuboError::Malformed(format!("quadratic key {k:?} must have i < j")));
            }
            p.add_quadratic(i, j, T::from_f64_lossy(c));
        }
        Ok(p)
    }

    fn index(&self, k: &str) -> Result<usize, QuboError> {
        let i: usize = k
            .trim()
            .parse()
            .map_err(|_| QuboError::Malformed(format!("bad variable index {k:?}")))?;
        if i >= self.n {
            return Err(QuboError::IndexOutOfRange { index: i, num_vars: self.n });
        }
        Ok(i)
    }
}

/// SHA-256 of the compact JSON export, hex encoded.
pub fn content_hash<T: Scalar>(p: &QuboPolynomial<T>) -> String {
    let doc = QuboDocument::from_polynomial(p);
    let bytes = serde_json::to_vec(&doc).expect("QUBO documents always serialize");
    hex::encode(Sha256::digest(&bytes))
}

impl<T: Scalar> QuboPolynomial<T> {
    /// Dense symmetric matrix text: a header line `n constant`, then `n` rows
    /// of `Q` such that `value = constant + xᵀQx` (diagonal holds the linear
    /// coefficients, off-diagonals hold half of each pair coefficient).
    pub fn to_dense_matrix_text(&self) -> String {
        let n = self.num_vars();
        let mut q = vec![vec![0.0f64; n]; n];
        for (&i, &c) in self.linear() {
            q[i][i] = c.to_f64_lossy();
        }
        for (&(i, j), &c) in self.quadratic() {
            let half = c.to_f64_lossy() / 2.0;
            q[i][j] = half;
            q[j][i] = half;
        }
        let mut out = String::new();
        writeln!(out, "{} {:?}", n, self.constant().to_f64_lossy()).unwrap();
        for row in q {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:?}")).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        out
    }
}
