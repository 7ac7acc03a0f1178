//! Closed tours through every vertex, on the sliced model with the route
//! returning to its start.
//!
//! Slice 0 and slice `|V|` hold the start and are fixed. Slices `1..|V|` each
//! hold the other vertices, so a tour of `|V|` arcs uses `(|V|-1)²` variables
//! before pruning. On top of the one-per-slice and transition terms,
//! `P·Σ_{v≠o} (Σ_c X_{c,v} - 1)²` asks for every vertex exactly once.

use crate::graph::WeightedDigraph;
use crate::qubo::{Literal, Penalty, QuboError, QuboPolynomial};
use crate::Scalar;

use super::{FormulationError, RouteDecoding, Violation};

/// A decoded tour: starts and ends at the start vertex.
pub type TourDecoding<T> = RouteDecoding<T>;

#[derive(Debug, Clone)]
pub struct TspCompilation<T> {
    pub polynomial: QuboPolynomial<T>,
    pub graph: WeightedDigraph<T>,
    pub start: usize,
    pub penalty: Penalty<T>,
    pub prune: bool,
    /// `slots[c]` lists `(vertex, literal)` for slice `c`, `0 ..= |V|`.
    pub slots: Vec<Vec<(usize, Literal)>>,
    pub n_naive: usize,
    pub n_actual: usize,
}

impl<T: Scalar> TspCompilation<T> {
    pub fn num_slices(&self) -> usize {
        self.slots.len()
    }

    pub fn var_index(&self, c: usize, v: usize) -> Option<usize> {
        self.slots.get(c)?.iter().find_map(|&(u, l)| match l {
            Literal::Var(i) if u == v => Some(i),
            _ => None,
        })
    }

    /// Bitstring of the tour `start, v_1, …, v_{|V|-1}` (the return is implied).
    pub fn encode_tour(&self, order: &[usize]) -> Result<Vec<bool>, FormulationError> {
        let n = self.graph.num_vertices();
        if order.len() != n || order[0] != self.start {
            return Err(FormulationError::Steps(format!(
                "a tour lists {n} vertices starting at {:?}",
                self.graph.vertex_name(self.start)
            )));
        }
        let mut x = vec![false; self.polynomial.num_vars()];
        for (c, &v) in order.iter().enumerate().skip(1) {
            let i = self.var_index(c, v).ok_or_else(|| {
                FormulationError::Steps(format!("vertex {:?} cannot occupy slice {c}", self.graph.vertex_name(v)))
            })?;
            x[i] = true;
        }
        Ok(x)
    }
}

/// Vertices other than `start` that a walk from `start` can occupy after
/// exactly `c` steps without passing `start` again, for `c = 0..=steps`.
fn cone<T: Scalar>(g: &WeightedDigraph<T>, start: usize, steps: usize, forward: bool) -> Vec<Vec<bool>> {
    let n = g.num_vertices();
    let mut layers = Vec::with_capacity(steps + 1);
    let mut cur = vec![false; n];
    cur[start] = true;
    layers.push(cur.clone());
    for _ in 0..steps {
        let mut next = vec![false; n];
        for v in (0..n).filter(|&v| cur[v]) {
            let arcs = if forward { g.out_arcs(v) } else { g.in_arcs(v) };
            for &a in arcs {
                let arc = g.arc(a);
                let u = if forward { arc.target } else { arc.source };
                if u != start && u != v {
                    next[u] = true;
                }
            }
        }
        layers.push(next.clone());
        cur = next;
    }
    layers
}

pub fn compile_tsp<T: Scalar>(
    g: &WeightedDigraph<T>,
    start: &str,
    penalty: Penalty<T>,
    prune: bool,
) -> Result<TspCompilation<T>, FormulationError> {
    let n = g.num_vertices();
    if n < 3 {
        return Err(FormulationError::TooFewVertices(n));
    }
    let o = g.require_vertex(start)?;
    let last = n;
    let (fwd, bwd) = if prune {
        (cone(g, o, last, true), cone(g, o, last, false))
    } else {
        (Vec::new(), Vec::new())
    };
    let allowed = |c: usize, v: usize| !prune || (fwd[c][v] && bwd[last - c][v]);

    if prune {
        for v in (0..n).filter(|&v| v != o) {
            if !(1..last).any(|c| allowed(c, v)) {
                return Err(FormulationError::NoTour(g.vertex_name(v).to_string()));
            }
        }
    }

    let p = penalty.value();
    let one = T::one();
    let mut poly = QuboPolynomial::new();
    let mut slots: Vec<Vec<(usize, Literal)>> = vec![vec![(o, Literal::Fixed(true))]];
    for c in 1..last {
        let mut row = Vec::new();
        for v in (0..n).filter(|&v| v != o && allowed(c, v)) {
            let i = poly.add_variable(format!("t{c}:v{}", g.vertex_name(v)))?;
            row.push((v, Literal::Var(i)));
        }
        if row.is_empty() {
            return Err(FormulationError::NoTour(format!("<slice {c}>")));
        }
        slots.push(row);
    }
    slots.push(vec![(o, Literal::Fixed(true))]);

    for row in &slots[1..last] {
        let terms: Vec<(Literal, T)> = row.iter().map(|&(_, l)| (l, one)).collect();
        poly.add_squared_literals(&terms, -one, p);
    }
    for v in (0..n).filter(|&v| v != o) {
        let terms: Vec<(Literal, T)> = slots[1..last]
            .iter()
            .flat_map(|row| row.iter().filter(|&&(u, _)| u == v).map(|&(_, l)| (l, one)))
            .collect();
        poly.add_squared_literals(&terms, -one, p);
    }
    for c in 0..last {
        for &(v, a) in &slots[c] {
            for &(w, b) in &slots[c + 1] {
                let cost = if v == w { p } else { g.weight_between(v, w).unwrap_or(p) };
                poly.add_literal_product(a, b, cost);
            }
        }
    }

    let n_actual = poly.num_vars();
    Ok(TspCompilation {
        polynomial: poly,
        graph: g.clone(),
        start: o,
        penalty,
        prune,
        slots,
        n_naive: (n - 1) * (n - 1),
        n_actual,
    })
}

pub fn decode_tsp<T: Scalar>(c: &TspCompilation<T>, x: &[bool]) -> Result<TourDecoding<T>, FormulationError> {
    if x.len() != c.polynomial.num_vars() {
        return Err(QuboError::LengthMismatch {
            expected: c.polynomial.num_vars(),
            got: x.len(),
        }
        .into());
    }
    let g = &c.graph;
    let on = |l: Literal| match l {
        Literal::Fixed(b) => b,
        Literal::Var(i) => x[i],
    };
    let mut violations = Vec::new();
    let mut order = Vec::with_capacity(c.slots.len());
    let mut visits = vec![0usize; g.num_vertices()];
    for (s, row) in c.slots.iter().enumerate() {
        let active: Vec<usize> = row.iter().filter(|&&(_, l)| on(l)).map(|&(v, _)| v).collect();
        if s > 0 && s + 1 < c.slots.len() {
            for &v in &active {
                visits[v] += 1;
            }
        }
        if active.len() == 1 {
            order.push(active[0]);
        } else {
            violations.push(Violation::SliceOccupancy {
                slice: s,
                count: active.len(),
            });
        }
    }
    for v in (0..g.num_vertices()).filter(|&v| v != c.start) {
        if visits[v] != 1 {
            violations.push(Violation::VisitCount {
                vertex: g.vertex_name(v).to_string(),
                count: visits[v],
            });
        }
    }
    if order.len() != c.slots.len() {
        return Ok(RouteDecoding {
            vertices: Vec::new(),
            weight: T::zero(),
            violations,
        });
    }
    let mut weight = T::zero();
    for (s, pair) in order.windows(2).enumerate() {
        match g.weight_between(pair[0], pair[1]).filter(|_| pair[0] != pair[1]) {
            Some(w) => weight += w,
            None => violations.push(Violation::ForbiddenTransition {
                slice: s,
                from: g.vertex_name(pair[0]).to_string(),
                to: g.vertex_name(pair[1]).to_string(),
            }),
        }
    }
    Ok(RouteDecoding {
        vertices: order.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
        weight,
        violations,
    })
}
