//! Weighted directed graphs, route queries and the classical oracles used to
//! check compiled formulations.

mod io;
pub mod oracle;

use std::collections::HashMap;

use thiserror::Error;

use crate::Scalar;

pub use io::{emit_graph, parse_graph, ArcDocument, GraphDocument};
pub use oracle::{dijkstra, enumerate_simple_paths, k_shortest_paths, Path};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("non-positive weight {weight} on arc {location} ({source_id}->{target_id})")]
    NonPositiveWeight {
        location: String,
        source_id: String,
        target_id: String,
        weight: f64,
    },
    #[error("duplicate arc {source_id}->{target_id} at {location}")]
    DuplicateArc {
        location: String,
        source_id: String,
        target_id: String,
    },
    #[error("dangling endpoint {vertex:?} on arc {location}")]
    DanglingEndpoint { location: String, vertex: String },
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("origin and destination must differ (both {0:?})")]
    SameEndpoints(String),
    #[error("maximum path length must be at least 1")]
    ZeroMaxLength,
}

/// One arc `source -> target` with its weight. Endpoints are vertex indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedArc<T> {
    pub source: usize,
    pub target: usize,
    pub weight: T,
}

/// Directed graph with strictly positive arc weights.
///
/// Vertices and arcs keep insertion order; every variable index derived
/// downstream depends on it. The only arc allowed to carry weight zero is the
/// destination self-loop installed by
/// [`modify_for_expansion`](crate::expansion::modify_for_expansion).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph<T> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    arcs: Vec<DirectedArc<T>>,
    arc_index: HashMap<(usize, usize), usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    parking: Option<usize>,
}

impl<T: Scalar> Default for WeightedDigraph<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> WeightedDigraph<T> {
    pub fn new() -> Self {
        Self {
            names: Vec::new(),
            index: HashMap::new(),
            arcs: Vec::new(),
            arc_index: HashMap::new(),
            out_adj: Vec::new(),
            in_adj: Vec::new(),
            parking: None,
        }
    }

    /// Builds a graph from vertex names and `(source, target, weight)` triples.
    pub fn from_parts<S: AsRef<str>>(
        vertices: &[S],
        arcs: &[(S, S, T)],
    ) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v.as_ref())?;
        }
        for (s, t, w) in arcs {
            g.add_arc(s.as_ref(), t.as_ref(), *w)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        if self.index.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        Ok(id)
    }

    pub fn add_arc(&mut self, source: &str, target: &str, weight: T) -> Result<usize, GraphError> {
        let location = format!("arcs[{}]", self.arcs.len());
        let s = self.index.get(source).copied().ok_or_else(|| GraphError::DanglingEndpoint {
            location: location.clone(),
            vertex: source.to_string(),
        })?;
        let t = self.index.get(target).copied().ok_or_else(|| GraphError::DanglingEndpoint {
            location: location.clone(),
            vertex: target.to_string(),
        })?;
        self.add_arc_by_index(s, t, weight)
    }

    pub fn add_arc_by_index(&mut self, s: usize, t: usize, weight: T) -> Result<usize, GraphError> {
        let location = format!("arcs[{}]", self.arcs.len());
        if s >= self.names.len() || t >= self.names.len() {
            return Err(GraphError::DanglingEndpoint {
                location,
                vertex: format!("#{}", s.max(t)),
            });
        }
        // NaN fails this test as well.
        if !(weight > T::zero()) {
            return Err(GraphError::NonPositiveWeight {
                location,
                source_id: self.names[s].clone(),
                target_id: self.names[t].clone(),
                weight: weight.to_f64_lossy(),
            });
        }
        self.push_arc(s, t, weight, location)
    }

    fn push_arc(&mut self, s: usize, t: usize, weight: T, location: String) -> Result<usize, GraphError> {
        if self.arc_index.contains_key(&(s, t)) {
            return Err(GraphError::DuplicateArc {
                location,
                source_id: self.names[s].clone(),
                target_id: self.names[t].clone(),
            });
        }
        let id = self.arcs.len();
        self.arcs.push(DirectedArc { source: s, target: t, weight });
        self.arc_index.insert((s, t), id);
        self.out_adj[s].push(id);
        self.in_adj[t].push(id);
        Ok(id)
    }

    /// Installs the zero-weight self-loop at `v`, replacing an existing loop's
    /// weight. Only one such loop may exist per graph.
    pub(crate) fn set_parking_loop(&mut self, v: usize) {
        match self.arc_index.get(&(v, v)) {
            Some(&a) => self.arcs[a].weight = T::zero(),
            None => {
                let location = format!("arcs[{}]", self.arcs.len());
                self.push_arc(v, v, T::zero(), location)
                    .expect("loop absence checked above");
            }
        }
        self.parking = Some(v);
    }

    /// Vertex carrying the zero-weight self-loop, if any.
    pub fn parking_vertex(&self) -> Option<usize> {
        self.parking
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.names
    }

    pub fn arcs(&self) -> &[DirectedArc<T>] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &DirectedArc<T> {
        &self.arcs[id]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_vertex(&self, name: &str) -> Result<usize, GraphError> {
        self.vertex_index(name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn arc_between(&self, s: usize, t: usize) -> Option<usize> {
        self.arc_index.get(&(s, t)).copied()
    }

    pub fn weight_between(&self, s: usize, t: usize) -> Option<T> {
        self.arc_between(s, t).map(|a| self.arcs[a].weight)
    }

    /// Outgoing arc ids of `v` in insertion order.
    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// Incoming arc ids of `v` in insertion order.
    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// `"s->t"` label of an arc, also used as its external id.
    pub fn arc_label(&self, id: usize) -> String {
        let a = &self.arcs[id];
        format!("{}->{}", self.names[a.source], self.names[a.target])
    }

    pub fn total_weight(&self) -> T {
        self.arcs.iter().map(|a| a.weight).sum()
    }

    /// Converts every weight to another scalar type.
    pub fn cast<U: Scalar>(&self) -> WeightedDigraph<U> {
        WeightedDigraph {
            names: self.names.clone(),
            index: self.index.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|a| DirectedArc {
                    source: a.source,
                    target: a.target,
                    weight: U::from_f64_lossy(a.weight.to_f64_lossy()),
                })
                .collect(),
            arc_index: self.arc_index.clone(),
            out_adj: self.out_adj.clone(),
            in_adj: self.in_adj.clone(),
            parking: self.parking,
        }
    }

    /// Subgraph on `keep` (in this graph's vertex order) with every arc of this
    /// graph between kept vertices.
    pub fn induced_subgraph(&self, keep: &[bool]) -> WeightedDigraph<T> {
        let mut sub = WeightedDigraph::new();
        for (v, name) in self.names.iter().enumerate() {
            if keep[v] {
                sub.add_vertex(name).expect("names are unique");
            }
        }
        for a in &self.arcs {
            if keep[a.source] && keep[a.target] {
                let s = sub.vertex_index(&self.names[a.source]).unwrap();
                let t = sub.vertex_index(&self.names[a.target]).unwrap();
                let location = format!("arcs[{}]", sub.arcs.len());
                sub.push_arc(s, t, a.weight, location).expect("arcs are unique");
            }
        }
        if let Some(p) = self.parking {
            if keep[p] {
                sub.parking = sub.vertex_index(&self.names[p]);
            }
        }
        sub
    }
}

/// Origin/destination pair, by vertex name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RouteQuery {
    pub origin: String,
    pub destination: String,
}

impl RouteQuery {
    pub fn new(origin: impl Into<String>, destination: impl Into<String>) -> Self {
        Self {
            origin: origin.into(),
            destination: destination.into(),
        }
    }

    /// Resolves the query against `g`, checking both endpoints exist and differ.
    pub fn resolve<T: Scalar>(&self, g: &WeightedDigraph<T>) -> Result<(usize, usize), GraphError> {
        if self.origin == self.destination {
            return Err(GraphError::SameEndpoints(self.origin.clone()));
        }
        Ok((g.require_vertex(&self.origin)?, g.require_vertex(&self.destination)?))
    }
}

/// Ten-vertex sample graph with 17 arcs, all of weight one. Used throughout
/// the tests and examples.
pub fn sample_graph() -> WeightedDigraph<f64> {
    let vertices = ["o", "d", "1", "2", "3", "4", "5", "6", "7", "8"];
    let arcs = [
        ("o", "1"),
        ("o", "5"),
        ("o", "2"),
        ("o", "3"),
        ("5", "1"),
        ("1", "6"),
        ("6", "8"),
        ("3", "2"),
        ("3", "4"),
        ("4", "7"),
        ("4", "d"),
        ("7", "d"),
        ("d", "8"),
        ("6", "d"),
        ("2", "d"),
        ("2", "4"),
        ("2", "6"),
    ];
    let mut g = WeightedDigraph::new();
    for v in vertices {
        g.add_vertex(v).unwrap();
    }
    for (s, t) in arcs {
        g.add_arc(s, t, 1.0).unwrap();
    }
    g
}
