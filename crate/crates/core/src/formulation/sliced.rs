//! Shortest path over a time-expanded graph, one variable per (slice, vertex).
//!
//! The polynomial is `P·Σ_c (Σ_{v∈V_c} X_{c,v} - 1)²` plus
//! `Σ_c Σ_{v∈V_c, v'∈V_{c+1}} d(v, v')·X_{c,v}·X_{c+1,v'}`, where `d` is the
//! arc weight when the arc exists and `P` otherwise. The origin in slice 0 and
//! the destination in the last slice are fixed to one, the rest of the last
//! slice to zero, and those variables are substituted away.

use crate::expansion::TimeExpandedGraph;
use crate::qubo::{Literal, Penalty, QuboError, QuboPolynomial};
use crate::Scalar;

use super::{FormulationError, RouteDecoding, Violation};

/// Literals of one expansion inside a polynomial; `slots[c][k]` belongs to
/// the `k`-th vertex of slice `c`.
#[derive(Debug, Clone)]
pub struct SliceBlock<T> {
    pub expansion: TimeExpandedGraph<T>,
    pub slots: Vec<Vec<Literal>>,
}

impl<T: Scalar> SliceBlock<T> {
    /// Allocates variables named `{prefix}t{c}:v{vertex}` and adds both term
    /// families to `poly`.
    pub(crate) fn build(
        poly: &mut QuboPolynomial<T>,
        expansion: &TimeExpandedGraph<T>,
        penalty: Penalty<T>,
        prefix: &str,
    ) -> Result<Self, QuboError> {
        let p = penalty.value();
        let one = T::one();
        let c_max = expansion.c_max();
        let mut slots = Vec::with_capacity(c_max + 1);
        for c in 0..=c_max {
            let mut row = Vec::with_capacity(expansion.slice(c).len());
            for &v in expansion.slice(c) {
                let lit = if c == 0 {
                    Literal::Fixed(v == expansion.origin())
                } else if c == c_max {
                    Literal::Fixed(v == expansion.destination())
                } else {
                    Literal::Var(poly.add_variable(format!("{prefix}t{c}:v{}", expansion.vertex_name(v)))?)
                };
                row.push(lit);
            }
            slots.push(row);
        }

        // One vertex per slice. Slices 0 and c_max are fully fixed and satisfy it.
        for row in &slots[1..c_max] {
            let terms: Vec<(Literal, T)> = row.iter().map(|&l| (l, one)).collect();
            poly.add_squared_literals(&terms, -one, p);
        }

        for c in 0..c_max {
            for (i, &v) in expansion.slice(c).iter().enumerate() {
                for (j, &w) in expansion.slice(c + 1).iter().enumerate() {
                    let cost = expansion.arc_weight(c, v, w).unwrap_or(p);
                    poly.add_literal_product(slots[c][i], slots[c + 1][j], cost);
                }
            }
        }
        Ok(SliceBlock {
            expansion: expansion.clone(),
            slots,
        })
    }

    pub fn literal(&self, c: usize, v: usize) -> Option<Literal> {
        let k = self.expansion.slice(c).iter().position(|&u| u == v)?;
        Some(self.slots[c][k])
    }

    fn value(lit: Literal, x: &[bool]) -> bool {
        match lit {
            Literal::Fixed(b) => b,
            Literal::Var(i) => x[i],
        }
    }

    /// Active vertices of slice `c`.
    pub fn active(&self, c: usize, x: &[bool]) -> Vec<usize> {
        self.expansion
            .slice(c)
            .iter()
            .zip(&self.slots[c])
            .filter(|(_, &l)| Self::value(l, x))
            .map(|(&v, _)| v)
            .collect()
    }

    /// Sets the variables of a walk given as one vertex per slice.
    pub fn encode_walk(&self, walk: &[usize], x: &mut [bool]) -> Result<(), FormulationError> {
        if walk.len() != self.slots.len() {
            return Err(FormulationError::Steps(format!(
                "walk visits {} slices, expansion has {}",
                walk.len(),
                self.slots.len()
            )));
        }
        for (c, &v) in walk.iter().enumerate() {
            match self.literal(c, v) {
                Some(Literal::Var(i)) => x[i] = true,
                Some(Literal::Fixed(true)) => {}
                _ => {
                    return Err(FormulationError::Steps(format!(
                        "vertex {:?} cannot occupy slice {c}",
                        self.expansion.vertex_name(v)
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn decode(&self, x: &[bool]) -> RouteDecoding<T> {
        let xp = &self.expansion;
        let mut violations = Vec::new();
        let mut walk = Vec::with_capacity(self.slots.len());
        for c in 0..self.slots.len() {
            let active = self.active(c, x);
            if active.len() == 1 {
                walk.push(active[0]);
            } else {
                violations.push(Violation::SliceOccupancy {
                    slice: c,
                    count: active.len(),
                });
            }
        }
        if !violations.is_empty() {
            // Weight of whatever real transitions are active.
            let mut weight = T::zero();
            for c in 0..xp.c_max() {
                for &v in &self.active(c, x) {
                    for &w in &self.active(c + 1, x) {
                        if let Some(aw) = xp.arc_weight(c, v, w) {
                            weight += aw;
                        }
                    }
                }
            }
            return RouteDecoding {
                vertices: Vec::new(),
                weight,
                violations,
            };
        }
        let mut weight = T::zero();
        for c in 0..xp.c_max() {
            match xp.arc_weight(c, walk[c], walk[c + 1]) {
                Some(w) => weight += w,
                None => violations.push(Violation::ForbiddenTransition {
                    slice: c,
                    from: xp.vertex_name(walk[c]).to_string(),
                    to: xp.vertex_name(walk[c + 1]).to_string(),
                }),
            }
        }
        // Drop the waiting steps at the destination.
        let arrival = walk
            .iter()
            .position(|&v| v == xp.destination())
            .unwrap_or(walk.len() - 1);
        let vertices = walk[..=arrival]
            .iter()
            .map(|&v| xp.vertex_name(v).to_string())
            .collect();
        RouteDecoding {
            vertices,
            weight,
            violations,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SlicedCompilation<T> {
    pub polynomial: QuboPolynomial<T>,
    pub block: SliceBlock<T>,
    pub penalty: Penalty<T>,
}

impl<T: Scalar> SlicedCompilation<T> {
    pub fn expansion(&self) -> &TimeExpandedGraph<T> {
        &self.block.expansion
    }

    /// Pinned variables as `(slice, vertex, bit)`.
    pub fn fixed(&self) -> Vec<(usize, usize, bool)> {
        let mut out = Vec::new();
        for (c, row) in self.block.slots.iter().enumerate() {
            for (k, lit) in row.iter().enumerate() {
                if let Literal::Fixed(b) = lit {
                    out.push((c, self.expansion().slice(c)[k], *b));
                }
            }
        }
        out
    }

    /// Free variable of `(slice, vertex)`, if it is one.
    pub fn var_index(&self, c: usize, v: usize) -> Option<usize> {
        match self.block.literal(c, v)? {
            Literal::Var(i) => Some(i),
            Literal::Fixed(_) => None,
        }
    }

    /// Bitstring of a route given by vertex ids, padded with waits at the
    /// destination.
    pub fn encode_route(&self, route: &[usize]) -> Result<Vec<bool>, FormulationError> {
        let xp = self.expansion();
        let mut walk = route.to_vec();
        if walk.len() > xp.c_max() + 1 {
            return Err(FormulationError::Steps(format!(
                "route has {} arcs, expansion allows {}",
                route.len().saturating_sub(1),
                xp.c_max()
            )));
        }
        walk.resize(xp.c_max() + 1, xp.destination());
        let mut x = vec![false; self.polynomial.num_vars()];
        self.block.encode_walk(&walk, &mut x)?;
        Ok(x)
    }
}

impl<T: Scalar> Penalty<T> {
    /// Σ over distinct arcs of the expansion, plus one: the same bound as
    /// [`Penalty::default_for`] on the graph the expansion came from.
    pub fn default_for_expansion(x: &TimeExpandedGraph<T>) -> Self {
        Penalty::new(x.distinct_arc_weight_bound() + T::one()).expect("positive")
    }
}

pub fn compile_sliced<T: Scalar>(
    expansion: &TimeExpandedGraph<T>,
    penalty: Penalty<T>,
) -> Result<SlicedCompilation<T>, FormulationError> {
    let mut polynomial = QuboPolynomial::new();
    let block = SliceBlock::build(&mut polynomial, expansion, penalty, "")?;
    Ok(SlicedCompilation {
        polynomial,
        block,
        penalty,
    })
}

pub fn decode_sliced<T: Scalar>(c: &SlicedCompilation<T>, x: &[bool]) -> Result<RouteDecoding<T>, FormulationError> {
    if x.len() != c.polynomial.num_vars() {
        return Err(QuboError::LengthMismatch {
            expected: c.polynomial.num_vars(),
            got: x.len(),
        }
        .into());
    }
    Ok(c.block.decode(x))
}
