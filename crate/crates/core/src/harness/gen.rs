//! Seeded random graph families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::WeightedDigraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GraphFamily {
    /// Strongly connected: a random Hamiltonian cycle plus extra random arcs.
    Connected,
    /// `w × h` lattice with arcs both ways between 4-neighbours.
    Grid,
    /// Every ordered pair of distinct vertices.
    Complete,
}

/// Integer weights drawn from `1..=max_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    pub max_weight: u32,
    /// Total arc count for [`GraphFamily::Connected`]; defaults to `2·|V|`.
    pub arcs: Option<usize>,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_weight: 9,
            arcs: None,
        }
    }
}

/// Generates a graph. `size` is the vertex count, or the side length for grids
/// (`height` defaults to `size`).
pub fn generate(
    family: GraphFamily,
    size: usize,
    height: Option<usize>,
    seed: u64,
    opts: GenOptions,
) -> WeightedDigraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_w = opts.max_weight.max(1);
    let weight = move |rng: &mut ChaCha8Rng| f64::from(rng.gen_range(1..=max_w));
    let mut g = WeightedDigraph::new();
    match family {
        GraphFamily::Connected => {
            for i in 0..size {
                g.add_vertex(&format!("v{i}")).expect("fresh name");
            }
            if size < 2 {
                return g;
            }
            let mut order: Vec<usize> = (0..size).collect();
            order.shuffle(&mut rng);
            for k in 0..size {
                let (s, t) = (order[k], order[(k + 1) % size]);
                if g.arc_between(s, t).is_none() {
                    g.add_arc_by_index(s, t, weight(&mut rng)).expect("valid arc");
                }
            }
            let target = opts.arcs.unwrap_or(2 * size).min(size * (size - 1));
            while g.num_arcs() < target {
                let s = rng.gen_range(0..size);
                let t = rng.gen_range(0..size);
                if s != t && g.arc_between(s, t).is_none() {
                    g.add_arc_by_index(s, t, weight(&mut rng)).expect("valid arc");
                }
            }
        }
        GraphFamily::Grid => {
            let h = height.unwrap_or(size);
            for r in 0..h {
                for c in 0..size {
                    g.add_vertex(&format!("r{r}c{c}")).expect("fresh name");
                }
            }
            let id = |r: usize, c: usize| r * size + c;
            for r in 0..h {
                for c in 0..size {
                    let mut nbrs = Vec::new();
                    if r > 0 {
                        nbrs.push(id(r - 1, c));
                    }
                    if c > 0 {
                        nbrs.push(id(r, c - 1));
                    }
                    if c + 1 < size {
                        nbrs.push(id(r, c + 1));
                    }
                    if r + 1 < h {
                        nbrs.push(id(r + 1, c));
                    }
                    for t in nbrs {
                        g.add_arc_by_index(id(r, c), t, weight(&mut rng)).expect("valid arc");
                    }
                }
            }
        }
        GraphFamily::Complete => {
            for i in 0..size {
                g.add_vertex(&format!("v{i}")).expect("fresh name");
            }
            for s in 0..size {
                for t in 0..size {
                    if s != t {
                        g.add_arc_by_index(s, t, weight(&mut rng)).expect("valid arc");
                    }
                }
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::emit_graph;
    use crate::graph::oracle::hop_distances;

    #[test]
    fn complete_four() {
        let g = generate(GraphFamily::Complete, 4, None, 7, GenOptions::default());
        assert_eq!((g.num_vertices(), g.num_arcs()), (4, 12));
        assert!(g.arcs().iter().all(|a| (1.0..=9.0).contains(&a.weight) && a.weight.fract() == 0.0));
    }

    #[test]
    fn grid_three_by_three() {
        let g = generate(GraphFamily::Grid, 3, None, 1, GenOptions::default());
        assert_eq!(g.num_vertices(), 9);
        // 12 undirected lattice edges, both directions.
        assert_eq!(g.num_arcs(), 24);
        assert!(g.weight_between(0, 1).is_some() && g.weight_between(1, 0).is_some());
        assert!(g.weight_between(0, 4).is_none());
    }

    #[test]
    fn same_seed_same_bytes() {
        for fam in [GraphFamily::Connected, GraphFamily::Grid, GraphFamily::Complete] {
            let a = emit_graph(&generate(fam, 5, None, 11, GenOptions::default()));
            let b = emit_graph(&generate(fam, 5, None, 11, GenOptions::default()));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn connected_is_strongly_connected() {
        for seed in 0..50 {
            let n = 3 + (seed as usize % 6);
            let g = generate(
                GraphFamily::Connected,
                n,
                None,
                seed,
                GenOptions {
                    arcs: Some(16),
                    ..GenOptions::default()
                },
            );
            assert_eq!(g.num_arcs(), 16.min(n * (n - 1)));
            for v in 0..n {
                assert!(hop_distances(&g, v).iter().all(|d| d.is_some()));
            }
        }
    }
}
