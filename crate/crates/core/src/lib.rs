//! Compile routing problems on weighted directed graphs into quadratic
//! unconstrained binary optimization (QUBO) polynomials, minimize them with
//! exhaustive, annealing and simulated-QAOA backends, and check the decoded
//! routes against classical oracles.
//!
//! Four formulations are provided:
//!
//! * [`formulation::single`]: shortest path with one binary variable per arc.
//! * [`formulation::sliced`]: shortest path over a time-expanded graph
//!   ([`expansion`]), one variable per (slice, vertex).
//! * [`formulation::tsp`]: travelling salesperson on the sliced model with a
//!   once-per-vertex penalty and optional reachability pruning.
//! * [`formulation::multi`]: collision-free routing of several vehicles.
//!
//! The numeric core is generic over the scalar type (see [`Scalar`]); the
//! aliases below fix it to `f64`, which is what the file formats and the
//! command line use.

pub mod expansion;
pub mod formulation;
pub mod graph;
pub mod harness;
pub mod qubo;
mod scalar;
pub mod solvers;

pub use scalar::Scalar;

pub use expansion::{ExpansionOptions, SliceLimit, TimeExpandedGraph};
pub use formulation::{RouteDecoding, Violation};
pub use graph::{RouteQuery, WeightedDigraph};
pub use qubo::{IsingModel, Literal, Penalty, QuboPolynomial};
pub use solvers::{SolveConfig, SolveReport};

/// Graph with double precision weights.
pub type Digraph = WeightedDigraph<f64>;
/// Graph with single precision weights.
pub type Digraph32 = WeightedDigraph<f32>;
/// QUBO polynomial with double precision coefficients.
pub type Qubo = QuboPolynomial<f64>;
/// QUBO polynomial with single precision coefficients.
pub type Qubo32 = QuboPolynomial<f32>;
/// Time-expanded graph with double precision weights.
pub type Expansion = TimeExpandedGraph<f64>;
