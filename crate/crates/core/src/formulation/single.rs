//! Shortest path with one binary variable per arc.
//!
//! A selection of arcs is a route when the origin has one outgoing and no
//! incoming arc, the destination one incoming and no outgoing arc, and every
//! other vertex has at most one of each with in- and out-degree equal.

use crate::graph::{RouteQuery, WeightedDigraph};
use crate::qubo::{Penalty, QuboError, QuboPolynomial};
use crate::Scalar;

use super::{FormulationError, RouteDecoding, Violation};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SingleOptions {
    /// Use the linear flow-balance term `P·Σ_v (in(v) - out(v))` instead of
    /// the squared one. The linear term rewards vertices with surplus outflow,
    /// so minimizers can be invalid; it exists for comparison only.
    pub literal_flow_balance: bool,
}

#[derive(Debug, Clone)]
pub struct SingleVehicleCompilation<T> {
    pub polynomial: QuboPolynomial<T>,
    pub graph: WeightedDigraph<T>,
    pub query: RouteQuery,
    pub penalty: Penalty<T>,
    pub options: SingleOptions,
}

impl<T: Scalar> SingleVehicleCompilation<T> {
    /// Variable of arc `a`. Arcs map onto variables in insertion order.
    pub fn var_of_arc(&self, a: usize) -> usize {
        a
    }

    /// Indicator bitstring of a set of arcs.
    pub fn encode_arcs(&self, arcs: &[usize]) -> Vec<bool> {
        let mut x = vec![false; self.graph.num_arcs()];
        for &a in arcs {
            x[self.var_of_arc(a)] = true;
        }
        x
    }
}

pub fn compile_single<T: Scalar>(
    g: &WeightedDigraph<T>,
    q: &RouteQuery,
    penalty: Penalty<T>,
    options: SingleOptions,
) -> Result<SingleVehicleCompilation<T>, FormulationError> {
    let (o, d) = q.resolve(g)?;
    let p = penalty.value();
    let one = T::one();
    let mut poly = QuboPolynomial::new();
    for a in 0..g.num_arcs() {
        poly.add_variable(format!("arc:{}", g.arc_label(a)))?;
    }
    let ones = |ids: &[usize]| ids.iter().map(|&a| (a, one)).collect::<Vec<_>>();

    for (a, arc) in g.arcs().iter().enumerate() {
        poly.add_linear(a, arc.weight);
    }

    // Origin: one outgoing, no incoming.
    poly.add_squared_linear(&ones(g.out_arcs(o)), -one, p);
    for &a in g.in_arcs(o) {
        poly.add_linear(a, p);
    }
    // Destination: one incoming, no outgoing.
    poly.add_squared_linear(&ones(g.in_arcs(d)), -one, p);
    for &a in g.out_arcs(d) {
        poly.add_linear(a, p);
    }

    for v in (0..g.num_vertices()).filter(|&v| v != o && v != d) {
        let outgoing = ones(g.out_arcs(v));
        let incoming = ones(g.in_arcs(v));
        // (S - 1)·S vanishes for S in {0, 1}.
        poly.add_affine_product(&outgoing, -one, &outgoing, T::zero(), p);
        poly.add_affine_product(&incoming, -one, &incoming, T::zero(), p);

        let mut balance = incoming.clone();
        balance.extend(outgoing.iter().map(|&(a, c)| (a, -c)));
        if options.literal_flow_balance {
            for (a, c) in balance {
                poly.add_linear(a, p * c);
            }
        } else {
            poly.add_squared_linear(&balance, T::zero(), p);
        }
    }

    Ok(SingleVehicleCompilation {
        polynomial: poly,
        graph: g.clone(),
        query: q.clone(),
        penalty,
        options,
    })
}

pub fn decode_single<T: Scalar>(
    c: &SingleVehicleCompilation<T>,
    x: &[bool],
) -> Result<RouteDecoding<T>, FormulationError> {
    let g = &c.graph;
    if x.len() != g.num_arcs() {
        return Err(QuboError::LengthMismatch {
            expected: g.num_arcs(),
            got: x.len(),
        }
        .into());
    }
    let (o, d) = c.query.resolve(g)?;
    let selected: Vec<usize> = (0..g.num_arcs()).filter(|&a| x[c.var_of_arc(a)]).collect();
    let weight = selected.iter().map(|&a| g.arc(a).weight).sum();

    let n = g.num_vertices();
    let mut outgoing = vec![0usize; n];
    let mut incoming = vec![0usize; n];
    for &a in &selected {
        outgoing[g.arc(a).source] += 1;
        incoming[g.arc(a).target] += 1;
    }

    let mut violations = Vec::new();
    if outgoing[o] != 1 {
        violations.push(Violation::OriginOutDegree { count: outgoing[o] });
    }
    if incoming[o] != 0 {
        violations.push(Violation::OriginInDegree { count: incoming[o] });
    }
    if incoming[d] != 1 {
        violations.push(Violation::DestinationInDegree { count: incoming[d] });
    }
    if outgoing[d] != 0 {
        violations.push(Violation::DestinationOutDegree { count: outgoing[d] });
    }
    for v in (0..n).filter(|&v| v != o && v != d) {
        let name = g.vertex_name(v).to_string();
        if outgoing[v] > 1 {
            violations.push(Violation::OutDegree {
                vertex: name.clone(),
                count: outgoing[v],
            });
        }
        if incoming[v] > 1 {
            violations.push(Violation::InDegree {
                vertex: name.clone(),
                count: incoming[v],
            });
        }
        if incoming[v] != outgoing[v] {
            violations.push(Violation::FlowImbalance {
                vertex: name,
                incoming: incoming[v],
                outgoing: outgoing[v],
            });
        }
    }
    if !violations.is_empty() {
        return Ok(RouteDecoding {
            vertices: Vec::new(),
            weight,
            violations,
        });
    }

    // Degrees are now all 0 or 1, so following the unique outgoing arc from
    // the origin reaches the destination; anything left over is cycles.
    let mut next_arc = vec![None; n];
    for &a in &selected {
        next_arc[g.arc(a).source] = Some(a);
    }
    let mut used = vec![false; g.num_arcs()];
    let mut vertices = vec![g.vertex_name(o).to_string()];
    let mut v = o;
    while v != d {
        let a = next_arc[v].expect("balanced vertex with an incoming arc has an outgoing arc");
        used[a] = true;
        v = g.arc(a).target;
        vertices.push(g.vertex_name(v).to_string());
    }
    for &start in &selected {
        if used[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut a = start;
        while !used[a] {
            used[a] = true;
            cycle.push(g.vertex_name(g.arc(a).source).to_string());
            a = next_arc[g.arc(a).target].expect("cycle vertices have an outgoing arc");
        }
        violations.push(Violation::DetachedCycle { vertices: cycle });
    }
    if !violations.is_empty() {
        vertices.clear();
    }
    Ok(RouteDecoding {
        vertices,
        weight,
        violations,
    })
}
