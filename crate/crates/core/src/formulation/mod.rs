//! Routing problems compiled to QUBO polynomials, and decoders that turn
//! bitstrings back into routes with a list of violated constraints.

pub mod multi;
pub mod single;
pub mod sliced;
pub mod tsp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::ExpansionError;
use crate::graph::GraphError;
use crate::qubo::QuboError;

pub use multi::{
    build_subgraph, compile_multi, decode_multi, subdivide_for_speed, Collision, FleetDocument, FleetProblem,
    MultiCompilation, MultiDecoding, Vehicle, VehicleDocument,
};
pub use single::{compile_single, decode_single, SingleOptions, SingleVehicleCompilation};
pub use sliced::{compile_sliced, decode_sliced, SliceBlock, SlicedCompilation};
pub use tsp::{compile_tsp, decode_tsp, TourDecoding, TspCompilation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormulationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error("travelling salesperson needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("no tour exists: vertex {0:?} cannot be placed on a closed tour from the start")]
    NoTour(String),
    #[error("invalid fleet: {0}")]
    Fleet(String),
    #[error("invalid traversal steps: {0}")]
    Steps(String),
}

/// One violated constraint found while decoding. Vertices are named.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The origin must have exactly one selected outgoing arc.
    OriginOutDegree { count: usize },
    /// The origin must have no selected incoming arc.
    OriginInDegree { count: usize },
    /// The destination must have exactly one selected incoming arc.
    DestinationInDegree { count: usize },
    /// The destination must have no selected outgoing arc.
    DestinationOutDegree { count: usize },
    OutDegree { vertex: String, count: usize },
    InDegree { vertex: String, count: usize },
    FlowImbalance { vertex: String, incoming: usize, outgoing: usize },
    /// Selected arcs that form a cycle apart from the route.
    DetachedCycle { vertices: Vec<String> },
    /// A time slice must hold exactly one active vertex.
    SliceOccupancy { slice: usize, count: usize },
    /// Consecutive active vertices with no arc between them.
    ForbiddenTransition { slice: usize, from: String, to: String },
    /// A tour must visit every non-start vertex exactly once.
    VisitCount { vertex: String, count: usize },
}

impl Violation {
    /// Whether a penalty term of the polynomial is nonzero for this violation.
    /// Detached cycles satisfy every penalty term.
    pub fn is_penalized(&self) -> bool {
        !matches!(self, Violation::DetachedCycle { .. })
    }
}

/// A bitstring read back as a route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDecoding<T> {
    /// Vertices in traversal order. Empty when no single route can be traced.
    pub vertices: Vec<String>,
    /// Total weight of the selected arcs or transitions that exist.
    pub weight: T,
    pub violations: Vec<Violation>,
}

impl<T> RouteDecoding<T> {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}
