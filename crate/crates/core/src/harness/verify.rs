//! Checks a solve report against its problem: decode, then compare with an
//! independent classical optimum when one is affordable.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::expansion::{enumerate_walks, shortest_walk};
use crate::formulation::{
    decode_multi, decode_single, decode_sliced, decode_tsp, Collision, MultiCompilation, RouteDecoding, Violation,
};
use crate::graph::dijkstra;
use crate::graph::oracle::tsp_brute_force;

use super::problem::{Compiled, ProblemFile};
use super::{HarnessError, ReportFile};

/// Largest graph handed to the permutation oracle.
pub const TSP_ORACLE_MAX_VERTICES: usize = 9;
/// Walks enumerated per vehicle by the joint oracle.
pub const JOINT_ORACLE_MAX_WALKS: usize = 100_000;
/// Search nodes visited by the joint oracle.
pub const JOINT_ORACLE_MAX_NODES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Feasible and equal to the oracle optimum.
    Optimal,
    /// Feasible, with a positive gap to the oracle optimum.
    Feasible,
    /// At least one constraint is violated.
    Infeasible,
    /// Feasible, but no oracle could be run.
    Unverified,
}

impl Status {
    /// Process exit code for this verdict.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Optimal | Status::Feasible => 0,
            Status::Infeasible => 2,
            Status::Unverified => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRoute {
    pub id: String,
    pub route: Vec<String>,
    pub weight: f64,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub kind: String,
    pub problem_hash: String,
    /// Polynomial value of the reported bitstring.
    pub value: f64,
    /// Route weight of the decoded solution; for fleets, the sum over vehicles.
    pub weight: f64,
    pub routes: Vec<VehicleRoute>,
    pub violations: Vec<Violation>,
    pub collisions: Vec<Collision>,
    pub oracle: Option<String>,
    pub optimum: Option<f64>,
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

enum OracleOutcome {
    Optimum(f64),
    NoSolution,
    OverBudget(String),
}

pub fn verify(problem: &ProblemFile, report: &ReportFile) -> Result<Verdict, HarnessError> {
    if report.problem_hash != problem.hash {
        return Err(HarnessError::HashMismatch {
            problem: problem.hash.clone(),
            report: report.problem_hash.clone(),
        });
    }
    let compiled = problem.recompile()?;
    let x = report.assignment()?;
    let value = compiled.polynomial().evaluate(&x)?;

    let (routes, collisions, oracle_name, oracle): (Vec<VehicleRoute>, Vec<Collision>, &str, Box<dyn Fn() -> OracleOutcome>) =
        match &compiled {
            Compiled::Single(c) => {
                let d = decode_single(c, &x)?;
                let (g, q) = (c.graph.clone(), c.query.clone());
                (
                    vec![route("route", d)],
                    Vec::new(),
                    "dijkstra",
                    Box::new(move || match dijkstra(&g, &q) {
                        Ok(Some(p)) => OracleOutcome::Optimum(p.weight),
                        _ => OracleOutcome::NoSolution,
                    }),
                )
            }
            Compiled::Sliced(c) => {
                let d = decode_sliced(c, &x)?;
                let xp = c.expansion().clone();
                (
                    vec![route("route", d)],
                    Vec::new(),
                    "shortest_walk",
                    Box::new(move || match shortest_walk(&xp) {
                        Some((_, w)) => OracleOutcome::Optimum(w),
                        None => OracleOutcome::NoSolution,
                    }),
                )
            }
            Compiled::Tsp(c) => {
                let d = decode_tsp(c, &x)?;
                let (g, start) = (c.graph.clone(), c.start);
                (
                    vec![route("tour", d)],
                    Vec::new(),
                    "tsp_brute_force",
                    Box::new(move || {
                        if g.num_vertices() > TSP_ORACLE_MAX_VERTICES {
                            return OracleOutcome::OverBudget(format!(
                                "{} vertices exceed the permutation oracle limit of {TSP_ORACLE_MAX_VERTICES}",
                                g.num_vertices()
                            ));
                        }
                        match tsp_brute_force(&g, start) {
                            Some(t) => OracleOutcome::Optimum(t.weight),
                            None => OracleOutcome::NoSolution,
                        }
                    }),
                )
            }
            Compiled::Multi(c) => {
                let d = decode_multi(c, &x)?;
                let routes = d.vehicles.into_iter().map(|(id, r)| route(&id, r)).collect();
                let c = c.clone();
                (
                    routes,
                    d.collisions,
                    "joint_enumeration",
                    Box::new(move || joint_optimum(&c)),
                )
            }
        };

    let violations: Vec<Violation> = routes.iter().flat_map(|r| r.violations.iter().cloned()).collect();
    let weight: f64 = routes.iter().map(|r| r.weight).sum();
    let mut verdict = Verdict {
        status: Status::Unverified,
        kind: problem.source.kind().to_string(),
        problem_hash: problem.hash.clone(),
        value,
        weight,
        routes,
        violations,
        collisions,
        oracle: None,
        optimum: None,
        gap: None,
        note: None,
    };
    if !verdict.violations.is_empty() || !verdict.collisions.is_empty() {
        verdict.status = Status::Infeasible;
        return Ok(verdict);
    }
    match oracle() {
        OracleOutcome::Optimum(opt) => {
            let gap = weight - opt;
            verdict.oracle = Some(oracle_name.to_string());
            verdict.optimum = Some(opt);
            verdict.gap = Some(gap);
            verdict.status = if gap.abs() <= 1e-9 * (1.0 + opt.abs()) {
                Status::Optimal
            } else {
                Status::Feasible
            };
        }
        OracleOutcome::NoSolution => {
            verdict.oracle = Some(oracle_name.to_string());
            verdict.note = Some("oracle found no solution although the decoding is feasible".into());
        }
        OracleOutcome::OverBudget(why) => verdict.note = Some(why),
    }
    Ok(verdict)
}

fn route(id: &str, d: RouteDecoding<f64>) -> VehicleRoute {
    VehicleRoute {
        id: id.to_string(),
        route: d.vertices,
        weight: d.weight,
        violations: d.violations,
    }
}

/// Cheapest collision-free combination of per-vehicle walks, by depth-first
/// search over the vehicles.
fn joint_optimum(c: &MultiCompilation<f64>) -> OracleOutcome {
    let mut per_vehicle: Vec<Vec<(Vec<String>, f64)>> = Vec::new();
    for b in &c.blocks {
        let Some(walks) = enumerate_walks(&b.expansion, JOINT_ORACLE_MAX_WALKS) else {
            return OracleOutcome::OverBudget(format!(
                "a vehicle has more than {JOINT_ORACLE_MAX_WALKS} walks"
            ));
        };
        let named = walks
            .into_iter()
            .map(|(w, weight)| (w.iter().map(|&v| b.expansion.vertex_name(v).to_string()).collect(), weight))
            .collect();
        per_vehicle.push(named);
    }
    let mut search = JointSearch {
        walks: &per_vehicle,
        occupied: HashMap::new(),
        best: None,
        nodes: 0,
    };
    if !search.visit(0, 0.0) {
        return OracleOutcome::OverBudget(format!("joint search exceeded {JOINT_ORACLE_MAX_NODES} nodes"));
    }
    match search.best {
        Some(b) => OracleOutcome::Optimum(b),
        None => OracleOutcome::NoSolution,
    }
}

struct JointSearch<'a> {
    walks: &'a [Vec<(Vec<String>, f64)>],
    occupied: HashMap<(usize, &'a str), ()>,
    best: Option<f64>,
    nodes: usize,
}

impl<'a> JointSearch<'a> {
    /// Returns false when the node budget runs out.
    fn visit(&mut self, i: usize, weight: f64) -> bool {
        if i == self.walks.len() {
            if self.best.is_none_or(|b| weight < b) {
                self.best = Some(weight);
            }
            return true;
        }
        let walks = self.walks;
        for (walk, w) in &walks[i] {
            self.nodes += 1;
            if self.nodes > JOINT_ORACLE_MAX_NODES {
                return false;
            }
            // Slice 0 is left out, as in the collision term.
            if walk.iter().enumerate().skip(1).any(|(c, v)| self.occupied.contains_key(&(c, v.as_str()))) {
                continue;
            }
            for (c, v) in walk.iter().enumerate().skip(1) {
                self.occupied.insert((c, v.as_str()), ());
            }
            let ok = self.visit(i + 1, weight + w);
            for (c, v) in walk.iter().enumerate().skip(1) {
                self.occupied.remove(&(c, v.as_str()));
            }
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_graph, GraphDocument};
    use crate::harness::problem::ProblemSource;
    use crate::harness::solve_problem;
    use crate::qubo::bits_to_string;
    use crate::solvers::{Backend, SolveConfig};

    fn sample() -> ProblemFile {
        ProblemFile::build(
            ProblemSource::Single {
                graph: GraphDocument::from_graph(&sample_graph()),
                origin: "o".into(),
                dest: "d".into(),
                literal_flow_balance: false,
            },
            None,
        )
        .unwrap()
        .0
    }

    #[test]
    fn exact_solve_is_optimal() {
        let p = sample();
        let r = solve_problem(&p, &SolveConfig::new(Backend::Exact)).unwrap();
        let v = verify(&p, &r).unwrap();
        assert_eq!(v.status, Status::Optimal);
        assert_eq!(v.gap, Some(0.0));
        assert_eq!(v.routes[0].route, ["o", "2", "d"]);
    }

    #[test]
    fn suboptimal_route_has_a_gap() {
        let p = sample();
        let mut r = solve_problem(&p, &SolveConfig::new(Backend::Exact)).unwrap();
        let Compiled::Single(c) = p.recompile().unwrap() else { unreachable!() };
        let g = &c.graph;
        let id = |s: &str, t: &str| g.arc_between(g.vertex_index(s).unwrap(), g.vertex_index(t).unwrap()).unwrap();
        let x = c.encode_arcs(&[id("o", "2"), id("2", "4"), id("4", "d")]);
        r.bits = bits_to_string(&x);
        r.value = 3.0;
        let v = verify(&p, &r).unwrap();
        assert_eq!(v.status, Status::Feasible);
        assert_eq!(v.gap, Some(1.0));
        assert_eq!(v.status.exit_code(), 0);
    }

    #[test]
    fn violating_bitstring_is_infeasible() {
        let p = sample();
        let mut r = solve_problem(&p, &SolveConfig::new(Backend::Exact)).unwrap();
        r.bits = "0".repeat(17);
        let v = verify(&p, &r).unwrap();
        assert_eq!(v.status, Status::Infeasible);
        assert!(v.violations.contains(&Violation::OriginOutDegree { count: 0 }));
        assert_eq!(v.status.exit_code(), 2);
        assert_eq!(v.oracle, None);
    }

    #[test]
    fn hash_mismatch_is_an_error() {
        let p = sample();
        let mut r = solve_problem(&p, &SolveConfig::new(Backend::Exact)).unwrap();
        r.problem_hash = "00".into();
        assert!(matches!(verify(&p, &r), Err(HarnessError::HashMismatch { .. })));
    }

    #[test]
    fn large_tours_are_unverified() {
        let g = crate::harness::gen::generate(
            crate::harness::gen::GraphFamily::Complete,
            10,
            None,
            1,
            Default::default(),
        );
        let (p, _) = ProblemFile::build(
            ProblemSource::Tsp {
                graph: GraphDocument::from_graph(&g),
                start: "v0".into(),
                prune: false,
            },
            None,
        )
        .unwrap();
        // A hand-made feasible tour avoids solving an 81-variable problem.
        let Compiled::Tsp(c) = p.recompile().unwrap() else { unreachable!() };
        let x = c.encode_tour(&(0..10).collect::<Vec<_>>()).unwrap();
        let r = ReportFile::new(
            &p.hash,
            SolveConfig::new(Backend::Anneal),
            crate::solvers::SolveReport {
                backend: Backend::Anneal,
                seed: 0,
                value: c.polynomial.evaluate(&x).unwrap(),
                bits: x,
                wall_time: 0.0,
                anneal: None,
                qaoa: None,
            },
        );
        let v = verify(&p, &r).unwrap();
        assert_eq!(v.status, Status::Unverified);
        assert_eq!(v.status.exit_code(), 3);
        assert!(v.note.unwrap().contains("oracle limit"));
    }
}
