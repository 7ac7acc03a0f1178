//! Size and coefficient summary of a compiled problem.

use serde::{Deserialize, Serialize};

use super::problem::{Compiled, ProblemFile};
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemStats {
    pub kind: String,
    pub n: usize,
    pub constant: f64,
    pub linear_terms: usize,
    pub quadratic_terms: usize,
    pub min_abs_coefficient: Option<f64>,
    pub max_abs_coefficient: f64,
    /// Quadratic terms over the `n(n-1)/2` possible pairs.
    pub density: f64,
    pub penalty: f64,
    /// `(|V|-1)²` for tours.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsp_naive: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsp_actual: Option<usize>,
}

pub fn problem_stats(problem: &ProblemFile) -> Result<ProblemStats, HarnessError> {
    let p = problem.polynomial()?;
    let n = p.num_vars();
    let pairs = n * n.saturating_sub(1) / 2;
    let (tsp_naive, tsp_actual) = match problem.recompile()? {
        Compiled::Tsp(c) => (Some(c.n_naive), Some(c.n_actual)),
        _ => (None, None),
    };
    Ok(ProblemStats {
        kind: problem.source.kind().to_string(),
        n,
        constant: p.constant(),
        linear_terms: p.linear().len(),
        quadratic_terms: p.quadratic().len(),
        min_abs_coefficient: p.min_abs_nonzero_coefficient(),
        max_abs_coefficient: p.max_abs_coefficient(),
        density: if pairs == 0 {
            0.0
        } else {
            p.quadratic().len() as f64 / pairs as f64
        },
        penalty: problem.penalty,
        tsp_naive,
        tsp_actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_graph, GraphDocument, WeightedDigraph};
    use crate::harness::gen::{generate, GraphFamily};
    use crate::harness::problem::ProblemSource;

    #[test]
    fn counts() {
        let single = ProblemSource::Single {
            graph: GraphDocument::from_graph(&sample_graph()),
            origin: "o".into(),
            dest: "d".into(),
            literal_flow_balance: false,
        };
        let s = problem_stats(&ProblemFile::build(single, None).unwrap().0).unwrap();
        assert_eq!(s.n, 17);
        assert_eq!(s.tsp_naive, None);
        assert!(s.density > 0.0 && s.density <= 1.0);

        let k4 = generate(GraphFamily::Complete, 4, None, 3, Default::default());
        let tsp = |g: &WeightedDigraph<f64>, start: &str, prune| ProblemSource::Tsp {
            graph: GraphDocument::from_graph(g),
            start: start.into(),
            prune,
        };
        let s = problem_stats(&ProblemFile::build(tsp(&k4, "v0", false), None).unwrap().0).unwrap();
        assert_eq!((s.n, s.tsp_naive, s.tsp_actual), (9, Some(9), Some(9)));

        let ring = WeightedDigraph::from_parts(
            &["o", "1", "2", "3"],
            &[("o", "1", 1.0), ("1", "2", 1.0), ("2", "3", 1.0), ("3", "o", 1.0)],
        )
        .unwrap();
        let s = problem_stats(&ProblemFile::build(tsp(&ring, "o", true), None).unwrap().0).unwrap();
        assert_eq!((s.n, s.tsp_naive), (3, Some(9)));
    }
}
