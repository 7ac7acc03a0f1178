//! `problem.json`: the inputs of a compilation together with its polynomial.
//!
//! The inputs are kept so that a problem can be recompiled and decoded later;
//! the polynomial's content hash ties solve reports to the problem.

use serde::{Deserialize, Serialize};

use crate::expansion::ExpansionDocument;
use crate::formulation::multi::default_fleet_penalty;
use crate::formulation::{
    compile_multi, compile_single, compile_sliced, compile_tsp, FleetProblem, MultiCompilation, SingleOptions,
    SingleVehicleCompilation, SlicedCompilation, TspCompilation, Vehicle,
};
use crate::graph::{GraphDocument, RouteQuery};
use crate::qubo::{content_hash, Penalty, QuboDocument, QuboPolynomial};

use super::{HarnessError, PROBLEM_FORMAT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSource {
    pub id: String,
    pub origin: String,
    pub dest: String,
    pub subgraph: GraphDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSource {
    Single {
        graph: GraphDocument,
        origin: String,
        dest: String,
        literal_flow_balance: bool,
    },
    Sliced {
        expansion: ExpansionDocument,
    },
    Tsp {
        graph: GraphDocument,
        start: String,
        prune: bool,
    },
    Multi {
        graph: GraphDocument,
        vehicles: Vec<VehicleSource>,
        c_max: usize,
    },
}

impl ProblemSource {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSource::Single { .. } => "single",
            ProblemSource::Sliced { .. } => "sliced",
            ProblemSource::Tsp { .. } => "tsp",
            ProblemSource::Multi { .. } => "multi",
        }
    }

    /// Source of a fleet whose subgraphs and step count are already settled.
    pub fn from_fleet(f: &FleetProblem<f64>) -> Result<Self, HarnessError> {
        Ok(ProblemSource::Multi {
            graph: GraphDocument::from_graph(&f.base),
            vehicles: f
                .vehicles
                .iter()
                .map(|v| VehicleSource {
                    id: v.id.clone(),
                    origin: v.query.origin.clone(),
                    dest: v.query.destination.clone(),
                    subgraph: GraphDocument::from_graph(&v.subgraph),
                })
                .collect(),
            c_max: f.resolved_c_max()?,
        })
    }

    /// Compiles with `penalty`, or with the formulation's default.
    pub fn compile(&self, penalty: Option<f64>) -> Result<Compiled, HarnessError> {
        let penalty = penalty.map(Penalty::new).transpose()?;
        Ok(match self {
            ProblemSource::Single {
                graph,
                origin,
                dest,
                literal_flow_balance,
            } => {
                let g = graph.to_graph()?;
                let p = penalty.unwrap_or_else(|| Penalty::default_for(&g));
                let opts = SingleOptions {
                    literal_flow_balance: *literal_flow_balance,
                };
                Compiled::Single(compile_single(&g, &RouteQuery::new(origin, dest), p, opts)?)
            }
            ProblemSource::Sliced { expansion } => {
                let x = expansion.to_expansion()?;
                let p = penalty.unwrap_or_else(|| Penalty::default_for_expansion(&x));
                Compiled::Sliced(compile_sliced(&x, p)?)
            }
            ProblemSource::Tsp { graph, start, prune } => {
                let g = graph.to_graph()?;
                let p = penalty.unwrap_or_else(|| Penalty::default_for(&g));
                Compiled::Tsp(compile_tsp(&g, start, p, *prune)?)
            }
            ProblemSource::Multi { graph, vehicles, c_max } => {
                let mut f = FleetProblem {
                    base: graph.to_graph()?,
                    vehicles: Vec::with_capacity(vehicles.len()),
                    c_max: Some(*c_max),
                };
                for v in vehicles {
                    f.vehicles.push(Vehicle {
                        id: v.id.clone(),
                        query: RouteQuery::new(&v.origin, &v.dest),
                        subgraph: v.subgraph.to_graph()?,
                    });
                }
                let p = match penalty {
                    Some(p) => p,
                    None => {
                        f.validate()?;
                        default_fleet_penalty(&f.base, &f.expansions()?)
                    }
                };
                Compiled::Multi(compile_multi(&f, Some(p))?)
            }
        })
    }
}

/// A compilation of any kind.
#[derive(Debug, Clone)]
pub enum Compiled {
    Single(SingleVehicleCompilation<f64>),
    Sliced(SlicedCompilation<f64>),
    Tsp(TspCompilation<f64>),
    Multi(MultiCompilation<f64>),
}

impl Compiled {
    pub fn polynomial(&self) -> &QuboPolynomial<f64> {
        match self {
            Compiled::Single(c) => &c.polynomial,
            Compiled::Sliced(c) => &c.polynomial,
            Compiled::Tsp(c) => &c.polynomial,
            Compiled::Multi(c) => &c.polynomial,
        }
    }

    pub fn penalty(&self) -> f64 {
        match self {
            Compiled::Single(c) => c.penalty.value(),
            Compiled::Sliced(c) => c.penalty.value(),
            Compiled::Tsp(c) => c.penalty.value(),
            Compiled::Multi(c) => c.penalty.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format: String,
    pub source: ProblemSource,
    pub penalty: f64,
    /// Content hash of `qubo`.
    pub hash: String,
    pub qubo: QuboDocument,
}

impl ProblemFile {
    pub fn build(source: ProblemSource, penalty: Option<f64>) -> Result<(Self, Compiled), HarnessError> {
        let compiled = source.compile(penalty)?;
        let file = ProblemFile {
            format: PROBLEM_FORMAT.to_string(),
            penalty: compiled.penalty(),
            hash: content_hash(compiled.polynomial()),
            qubo: QuboDocument::from_polynomial(compiled.polynomial()),
            source,
        };
        Ok((file, compiled))
    }

    pub fn polynomial(&self) -> Result<QuboPolynomial<f64>, HarnessError> {
        let p = self.qubo.to_polynomial()?;
        let h = content_hash(&p);
        if h != self.hash {
            return Err(HarnessError::Inconsistent(format!(
                "stored hash {} does not match the polynomial ({h})",
                self.hash
            )));
        }
        Ok(p)
    }

    /// Recompiles from the stored inputs and checks that the result matches
    /// the stored polynomial.
    pub fn recompile(&self) -> Result<Compiled, HarnessError> {
        if self.format != PROBLEM_FORMAT {
            return Err(HarnessError::Inconsistent(format!("unknown format {:?}", self.format)));
        }
        let compiled = self.source.compile(Some(self.penalty))?;
        let h = content_hash(compiled.polynomial());
        if h != self.hash {
            return Err(HarnessError::Inconsistent(format!(
                "recompiling the inputs gives hash {h}, file says {}",
                self.hash
            )));
        }
        Ok(compiled)
    }
}
