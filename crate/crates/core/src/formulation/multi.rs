//! Several vehicles on one graph, each with its own sliced block, joined by a
//! collision term `P·Σ_{c≥1} Σ_v (D(c,v) - 1)·D(c,v)` where `D(c,v)` counts
//! the vehicles at `v` in slice `c`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::expansion::{expand, ExpansionOptions, SliceLimit, TimeExpandedGraph};
use crate::graph::oracle::hop_distances;
use crate::graph::{k_shortest_paths, GraphError, RouteQuery, WeightedDigraph};
use crate::qubo::{Literal, Penalty, QuboError, QuboPolynomial};
use crate::Scalar;

use super::sliced::SliceBlock;
use super::{FormulationError, RouteDecoding};

/// Corridor width used when none is given.
pub const DEFAULT_CORRIDOR: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle<T> {
    pub id: String,
    pub query: RouteQuery,
    pub subgraph: WeightedDigraph<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetProblem<T> {
    pub base: WeightedDigraph<T>,
    pub vehicles: Vec<Vehicle<T>>,
    /// Shared number of steps. `None` picks the largest hop distance plus one.
    pub c_max: Option<usize>,
}

/// One entry of a fleet file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleDocument {
    pub id: String,
    pub origin: String,
    pub dest: String,
}

/// Fleet file: either a bare list of vehicles or an object that also fixes
/// the number of steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FleetDocument {
    List(Vec<VehicleDocument>),
    Object {
        vehicles: Vec<VehicleDocument>,
        #[serde(default)]
        c_max: Option<usize>,
    },
}

impl FleetDocument {
    pub fn vehicles(&self) -> &[VehicleDocument] {
        match self {
            FleetDocument::List(v) => v,
            FleetDocument::Object { vehicles, .. } => vehicles,
        }
    }

    pub fn c_max(&self) -> Option<usize> {
        match self {
            FleetDocument::List(_) => None,
            FleetDocument::Object { c_max, .. } => *c_max,
        }
    }
}

impl<T: Scalar> FleetProblem<T> {
    /// Vehicles restricted to corridors of `corridor` shortest paths, or to the
    /// whole base graph when `corridor` is `None`.
    pub fn from_document(
        base: WeightedDigraph<T>,
        doc: &FleetDocument,
        corridor: Option<usize>,
    ) -> Result<Self, FormulationError> {
        let mut vehicles = Vec::new();
        for v in doc.vehicles() {
            let query = RouteQuery::new(v.origin.clone(), v.dest.clone());
            let subgraph = match corridor {
                Some(k) => build_subgraph(&base, &query, k)?,
                None => base.clone(),
            };
            vehicles.push(Vehicle {
                id: v.id.clone(),
                query,
                subgraph,
            });
        }
        let f = FleetProblem {
            base,
            vehicles,
            c_max: doc.c_max(),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), FormulationError> {
        let fleet = |m: String| Err(FormulationError::Fleet(m));
        if self.vehicles.is_empty() {
            return fleet("no vehicles".into());
        }
        let (mut ids, mut origins, mut dests) = (HashSet::new(), HashSet::new(), HashSet::new());
        for v in &self.vehicles {
            if v.id.is_empty() || v.id.contains(':') {
                return fleet(format!("vehicle id {:?} must be non-empty without ':'", v.id));
            }
            if !ids.insert(v.id.as_str()) {
                return fleet(format!("duplicate vehicle id {:?}", v.id));
            }
            if !origins.insert(v.query.origin.as_str()) {
                return fleet(format!("two vehicles start at {:?}", v.query.origin));
            }
            if !dests.insert(v.query.destination.as_str()) {
                return fleet(format!("two vehicles end at {:?}", v.query.destination));
            }
            v.query.resolve(&self.base)?;
            v.query.resolve(&v.subgraph)?;
            for a in v.subgraph.arcs() {
                let (s, t) = (v.subgraph.vertex_name(a.source), v.subgraph.vertex_name(a.target));
                let inside = self
                    .base
                    .vertex_index(s)
                    .zip(self.base.vertex_index(t))
                    .and_then(|(s, t)| self.base.weight_between(s, t));
                if inside != Some(a.weight) {
                    return fleet(format!("arc {s}->{t} of vehicle {:?} is not in the base graph", v.id));
                }
            }
            for name in v.subgraph.vertices() {
                if self.base.vertex_index(name).is_none() {
                    return fleet(format!("vertex {name:?} of vehicle {:?} is not in the base graph", v.id));
                }
            }
        }
        Ok(())
    }

    /// The shared step count: the override, or one more than the largest hop
    /// distance of any vehicle in its subgraph.
    pub fn resolved_c_max(&self) -> Result<usize, FormulationError> {
        if let Some(c) = self.c_max {
            return Ok(c);
        }
        let mut worst = 0;
        for v in &self.vehicles {
            let (o, d) = v.query.resolve(&v.subgraph)?;
            let hops = hop_distances(&v.subgraph, o)[d].ok_or_else(|| {
                FormulationError::Expansion(crate::expansion::ExpansionError::Unreachable {
                    origin: v.query.origin.clone(),
                    destination: v.query.destination.clone(),
                })
            })?;
            worst = worst.max(hops);
        }
        Ok(worst + 1)
    }

    /// Per-vehicle expansions at the shared step count, backward pruned.
    pub fn expansions(&self) -> Result<Vec<TimeExpandedGraph<T>>, FormulationError> {
        let c_max = self.resolved_c_max()?;
        let opts = ExpansionOptions {
            limit: SliceLimit::Exact(c_max),
            backward_prune: true,
        };
        self.vehicles
            .iter()
            .map(|v| Ok(expand(&v.subgraph, &v.query, opts)?))
            .collect()
    }
}

/// `max(Σ base weights, Σ_i walk bound_i) + 1`, which exceeds the weight of
/// every joint assignment without violations.
pub fn default_fleet_penalty<T: Scalar>(
    base: &WeightedDigraph<T>,
    expansions: &[TimeExpandedGraph<T>],
) -> Penalty<T> {
    let walks: T = expansions.iter().map(|x| x.walk_weight_bound()).sum();
    Penalty::new(base.total_weight().max(walks) + T::one()).expect("positive")
}

#[derive(Debug, Clone)]
pub struct MultiCompilation<T> {
    pub polynomial: QuboPolynomial<T>,
    pub ids: Vec<String>,
    pub blocks: Vec<SliceBlock<T>>,
    pub penalty: Penalty<T>,
    pub c_max: usize,
}

impl<T: Scalar> MultiCompilation<T> {
    /// Free variable of vehicle `i` at `(c, vertex)`.
    pub fn var_index(&self, i: usize, c: usize, vertex: &str) -> Option<usize> {
        let b = self.blocks.get(i)?;
        match b.literal(c, b.expansion.vertex_index(vertex)?)? {
            Literal::Var(k) => Some(k),
            Literal::Fixed(_) => None,
        }
    }

    /// Bitstring for one route per vehicle, each padded with waits at its
    /// destination. Routes are given by vertex name.
    pub fn encode_routes(&self, routes: &[Vec<String>]) -> Result<Vec<bool>, FormulationError> {
        if routes.len() != self.blocks.len() {
            return Err(FormulationError::Fleet(format!(
                "{} routes for {} vehicles",
                routes.len(),
                self.blocks.len()
            )));
        }
        let mut x = vec![false; self.polynomial.num_vars()];
        for (b, route) in self.blocks.iter().zip(routes) {
            let xp = &b.expansion;
            let mut walk = Vec::with_capacity(self.c_max + 1);
            for name in route {
                walk.push(
                    xp.vertex_index(name)
                        .ok_or_else(|| FormulationError::Graph(GraphError::UnknownVertex(name.clone())))?,
                );
            }
            if walk.len() > self.c_max + 1 {
                return Err(FormulationError::Steps(format!("route longer than {} steps", self.c_max)));
            }
            walk.resize(self.c_max + 1, xp.destination());
            b.encode_walk(&walk, &mut x)?;
        }
        Ok(x)
    }
}

pub fn compile_multi<T: Scalar>(
    f: &FleetProblem<T>,
    penalty: Option<Penalty<T>>,
) -> Result<MultiCompilation<T>, FormulationError> {
    f.validate()?;
    let expansions = f.expansions()?;
    let penalty = penalty.unwrap_or_else(|| default_fleet_penalty(&f.base, &expansions));
    let c_max = f.resolved_c_max()?;
    let mut polynomial = QuboPolynomial::new();
    let mut blocks = Vec::with_capacity(expansions.len());
    for (v, x) in f.vehicles.iter().zip(&expansions) {
        blocks.push(SliceBlock::build(&mut polynomial, x, penalty, &format!("veh{}:", v.id))?);
    }

    let one = T::one();
    for c in 1..=c_max {
        let mut by_vertex: BTreeMap<&str, Vec<(Literal, T)>> = BTreeMap::new();
        for b in &blocks {
            for (&v, &lit) in b.expansion.slice(c).iter().zip(&b.slots[c]) {
                by_vertex.entry(b.expansion.vertex_name(v)).or_default().push((lit, one));
            }
        }
        for terms in by_vertex.values().filter(|t| t.len() > 1) {
            polynomial.add_literal_affine_product(terms, -one, terms, T::zero(), penalty.value());
        }
    }

    Ok(MultiCompilation {
        polynomial,
        ids: f.vehicles.iter().map(|v| v.id.clone()).collect(),
        blocks,
        penalty,
        c_max,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub slice: usize,
    pub vertex: String,
    pub vehicles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiDecoding<T> {
    pub vehicles: Vec<(String, RouteDecoding<T>)>,
    pub collisions: Vec<Collision>,
}

impl<T> MultiDecoding<T> {
    pub fn is_feasible(&self) -> bool {
        self.collisions.is_empty() && self.vehicles.iter().all(|(_, d)| d.is_feasible())
    }
}

impl<T: Scalar> MultiDecoding<T> {
    pub fn total_weight(&self) -> T {
        self.vehicles.iter().map(|(_, d)| d.weight).sum()
    }
}

pub fn decode_multi<T: Scalar>(c: &MultiCompilation<T>, x: &[bool]) -> Result<MultiDecoding<T>, FormulationError> {
    if x.len() != c.polynomial.num_vars() {
        return Err(QuboError::LengthMismatch {
            expected: c.polynomial.num_vars(),
            got: x.len(),
        }
        .into());
    }
    let vehicles = c
        .ids
        .iter()
        .zip(&c.blocks)
        .map(|(id, b)| (id.clone(), b.decode(x)))
        .collect();
    let mut collisions = Vec::new();
    for s in 0..=c.c_max {
        let mut at: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for (id, b) in c.ids.iter().zip(&c.blocks) {
            for v in b.active(s, x) {
                at.entry(b.expansion.vertex_name(v)).or_default().push(id.clone());
            }
        }
        for (vertex, ids) in at {
            if ids.len() > 1 {
                collisions.push(Collision {
                    slice: s,
                    vertex: vertex.to_string(),
                    vehicles: ids,
                });
            }
        }
    }
    Ok(MultiDecoding { vehicles, collisions })
}

/// Replaces each arc with `m > 1` steps by a chain of `m` arcs of weight
/// `w / m` through new vertices named `{s}->{t}#{k}`. Keys of `steps` are arc
/// labels `s->t`.
pub fn subdivide_for_speed<T: Scalar>(
    g: &WeightedDigraph<T>,
    steps: &BTreeMap<String, usize>,
) -> Result<WeightedDigraph<T>, FormulationError> {
    let mut per_arc = vec![1usize; g.num_arcs()];
    let labels: BTreeMap<String, usize> = (0..g.num_arcs()).map(|a| (g.arc_label(a), a)).collect();
    for (label, &m) in steps {
        let &a = labels
            .get(label)
            .ok_or_else(|| FormulationError::Steps(format!("no arc {label:?}")))?;
        if m == 0 {
            return Err(FormulationError::Steps(format!("arc {label:?} needs at least one step")));
        }
        if m > 1 && g.arc(a).source == g.arc(a).target {
            return Err(FormulationError::Steps(format!("self-loop {label:?} cannot be subdivided")));
        }
        per_arc[a] = m;
    }

    let mut out = WeightedDigraph::new();
    for name in g.vertices() {
        out.add_vertex(name)?;
    }
    for (a, &m) in per_arc.iter().enumerate() {
        let arc = g.arc(a);
        if m == 1 {
            out.add_arc_by_index(arc.source, arc.target, arc.weight)?;
            continue;
        }
        let piece = arc.weight / T::of_usize(m);
        let label = g.arc_label(a);
        let mut prev = arc.source;
        for k in 1..m {
            let v = out.add_vertex(&format!("{label}#{k}"))?;
            out.add_arc_by_index(prev, v, piece)?;
            prev = v;
        }
        out.add_arc_by_index(prev, arc.target, piece)?;
    }
    Ok(out)
}

/// Union of the `k` shortest simple `o → d` paths, with every arc of `g`
/// between the vertices they use.
pub fn build_subgraph<T: Scalar>(
    g: &WeightedDigraph<T>,
    q: &RouteQuery,
    k: usize,
) -> Result<WeightedDigraph<T>, FormulationError> {
    if k == 0 {
        return Err(FormulationError::Fleet("corridor width must be at least 1".into()));
    }
    let paths = k_shortest_paths(g, q, k)?;
    if paths.is_empty() {
        return Err(crate::expansion::ExpansionError::Unreachable {
            origin: q.origin.clone(),
            destination: q.destination.clone(),
        }
        .into());
    }
    let used: BTreeSet<usize> = paths.iter().flat_map(|p| p.vertices(g)).collect();
    let keep: Vec<bool> = (0..g.num_vertices()).map(|v| used.contains(&v)).collect();
    Ok(g.induced_subgraph(&keep))
}
