//! Time-expanded graphs: the graph is cut into slices `V_0 .. V_cmax`, where
//! slice `c` holds the vertices a vehicle can occupy after `c` steps, and arcs
//! only join consecutive slices.

use std::collections::{BTreeMap, HashMap};

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::oracle::hop_distances;
use crate::graph::{GraphError, RouteQuery, WeightedDigraph};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("destination {destination:?} is unreachable from {origin:?}")]
    Unreachable { origin: String, destination: String },
    #[error("slice budget {c_max} reached but destination {destination:?} is not in the last slice")]
    BudgetExhausted { c_max: usize, destination: String },
    #[error("slice budget must be at least 1")]
    ZeroBudget,
    #[error("no arc {source_id}->{target_id} between slices {slice} and {}", slice + 1)]
    UnknownArc {
        slice: usize,
        source_id: String,
        target_id: String,
    },
    #[error("invalid weight {weight} on slice arc {source_id}->{target_id} at slice {slice}")]
    InvalidWeight {
        slice: usize,
        source_id: String,
        target_id: String,
        weight: f64,
    },
    #[error("malformed expansion document: {0}")]
    Malformed(String),
}

/// Removes every arc leaving `d` and installs the zero-weight self-loop `(d, d)`.
/// A pre-existing self-loop keeps its position and has its weight set to zero.
pub fn modify_for_expansion<T: Scalar>(g: &WeightedDigraph<T>, d: &str) -> Result<WeightedDigraph<T>, GraphError> {
    let dest = g.require_vertex(d)?;
    let mut out = WeightedDigraph::new();
    for v in g.vertices() {
        out.add_vertex(v)?;
    }
    for a in g.arcs() {
        if a.source != dest {
            out.add_arc_by_index(a.source, a.target, a.weight)?;
        } else if a.target == dest {
            out.set_parking_loop(dest);
        }
    }
    out.set_parking_loop(dest);
    Ok(out)
}

/// How many slices to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SliceLimit {
    /// Stop at the first slice equal to `{d}`, otherwise after `|V| - 1` steps.
    #[default]
    Auto,
    /// Stop at the first slice equal to `{d}`, otherwise after this many steps.
    Hint(usize),
    /// Build exactly this many steps; `{d}` slices repeat once reached.
    Exact(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExpansionOptions {
    pub limit: SliceLimit,
    /// Drop vertices that cannot reach the destination in the steps remaining.
    pub backward_prune: bool,
}

/// Arc from `(slice, from)` to `(slice + 1, to)`. Vertices index
/// [`TimeExpandedGraph::vertices`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceArc<T> {
    pub slice: usize,
    pub from: usize,
    pub to: usize,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeExpandedGraph<T> {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    slices: Vec<Vec<usize>>,
    arcs: Vec<SliceArc<T>>,
    arc_lookup: HashMap<(usize, usize, usize), usize>,
    origin: usize,
    destination: usize,
    backward_pruned: bool,
    fallback: bool,
}

impl<T: Scalar> TimeExpandedGraph<T> {
    pub fn c_max(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn destination(&self) -> usize {
        self.destination
    }

    pub fn query(&self) -> RouteQuery {
        RouteQuery::new(&self.vertices[self.origin], &self.vertices[self.destination])
    }

    /// Vertices of slice `c` in graph order.
    pub fn slice(&self, c: usize) -> &[usize] {
        &self.slices[c]
    }

    pub fn slices(&self) -> &[Vec<usize>] {
        &self.slices
    }

    pub fn slice_names(&self, c: usize) -> Vec<&str> {
        self.slices[c].iter().map(|&v| self.vertices[v].as_str()).collect()
    }

    pub fn arcs(&self) -> &[SliceArc<T>] {
        &self.arcs
    }

    /// Weight of the arc `(c, from) -> (c + 1, to)`, if present.
    pub fn arc_weight(&self, c: usize, from: usize, to: usize) -> Option<T> {
        self.arc_lookup.get(&(c, from, to)).map(|&a| self.arcs[a].weight)
    }

    /// Σ_c |V_c|.
    pub fn total_slots(&self) -> usize {
        self.slices.iter().map(Vec::len).sum()
    }

    pub fn is_backward_pruned(&self) -> bool {
        self.backward_pruned
    }

    /// True when the recurrence never produced a slice equal to `{d}` and the
    /// slice budget ended it instead.
    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    /// Σ over distinct `(v, v')` pairs of the largest weight any slice assigns
    /// to that pair. Bounds the weight of every simple route.
    pub fn distinct_arc_weight_bound(&self) -> T {
        let mut per_pair: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for a in &self.arcs {
            let e = per_pair.entry((a.from, a.to)).or_insert(a.weight);
            *e = e.max(a.weight);
        }
        per_pair.values().copied().sum()
    }

    /// Σ_c of the largest arc weight between slices `c` and `c + 1`. Bounds the
    /// weight of every walk through the expansion.
    pub fn walk_weight_bound(&self) -> T {
        let mut per_slice = vec![T::zero(); self.c_max()];
        for a in &self.arcs {
            per_slice[a.slice] = per_slice[a.slice].max(a.weight);
        }
        per_slice.into_iter().sum()
    }

    /// Replaces the weights of individual slice arcs, e.g. with forecasts for a
    /// given departure. Keys are `(slice, from, to)` by vertex name.
    pub fn with_weight_overrides(
        &self,
        overrides: &[(usize, String, String, T)],
    ) -> Result<Self, ExpansionError> {
        let mut out = self.clone();
        for (c, s, t, w) in overrides {
            let unknown = || ExpansionError::UnknownArc {
                slice: *c,
                source_id: s.clone(),
                target_id: t.clone(),
            };
            let from = self.vertex_index(s).ok_or_else(unknown)?;
            let to = self.vertex_index(t).ok_or_else(unknown)?;
            let &a = self.arc_lookup.get(&(*c, from, to)).ok_or_else(unknown)?;
            if !(*w >= T::zero()) || !w.is_finite() {
                return Err(ExpansionError::InvalidWeight {
                    slice: *c,
                    source_id: s.clone(),
                    target_id: t.clone(),
                    weight: w.to_f64_lossy(),
                });
            }
            out.arcs[a].weight = *w;
        }
        Ok(out)
    }

    fn from_slices(
        vertices: Vec<String>,
        slices: Vec<Vec<usize>>,
        arcs: Vec<SliceArc<T>>,
        origin: usize,
        destination: usize,
        backward_pruned: bool,
        fallback: bool,
    ) -> Self {
        let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let arc_lookup = arcs
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.slice, a.from, a.to), i))
            .collect();
        TimeExpandedGraph {
            vertices,
            index,
            slices,
            arcs,
            arc_lookup,
            origin,
            destination,
            backward_pruned,
            fallback,
        }
    }
}

/// Builds the time-expanded graph of `g` for `q`.
///
/// `g` is the unmodified graph; the destination self-loop is installed here.
pub fn expand<T: Scalar>(
    g: &WeightedDigraph<T>,
    q: &RouteQuery,
    options: ExpansionOptions,
) -> Result<TimeExpandedGraph<T>, ExpansionError> {
    let (o, d) = q.resolve(g)?;
    let modified = modify_for_expansion(g, &q.destination)?;
    if hop_distances(&modified, o)[d].is_none() {
        return Err(ExpansionError::Unreachable {
            origin: q.origin.clone(),
            destination: q.destination.clone(),
        });
    }
    let n = modified.num_vertices();
    let (budget, stop_at_destination) = match options.limit {
        SliceLimit::Auto => (n - 1, true),
        SliceLimit::Hint(k) => (k, true),
        SliceLimit::Exact(k) => (k, false),
    };
    if budget == 0 {
        return Err(ExpansionError::ZeroBudget);
    }

    let mut slices: Vec<Vec<usize>> = vec![vec![o]];
    loop {
        let c = slices.len() - 1;
        if stop_at_destination && slices[c] == [d] {
            break;
        }
        if c == budget {
            break;
        }
        let mut member = vec![false; n];
        for &v in &slices[c] {
            for &a in modified.out_arcs(v) {
                member[modified.arc(a).target] = true;
            }
        }
        slices.push((0..n).filter(|&v| member[v]).collect());
    }
    let c_max = slices.len() - 1;
    if !slices[c_max].contains(&d) {
        return Err(ExpansionError::BudgetExhausted {
            c_max,
            destination: q.destination.clone(),
        });
    }
    let fallback = slices[c_max] != [d];
    if fallback {
        warn!(
            "time expansion stopped at slice budget {c_max} with {} vertices in the last slice",
            slices[c_max].len()
        );
    }

    if options.backward_prune {
        let mut alive = vec![false; n];
        alive[d] = true;
        slices[c_max] = vec![d];
        for c in (0..c_max).rev() {
            let next = alive.clone();
            let mut here = vec![false; n];
            slices[c].retain(|&v| {
                let keep = modified
                    .out_arcs(v)
                    .iter()
                    .any(|&a| next[modified.arc(a).target]);
                here[v] = keep;
                keep
            });
            alive = here;
        }
    }

    let mut arcs = Vec::new();
    for c in 0..c_max {
        let mut member = vec![false; n];
        for &v in &slices[c + 1] {
            member[v] = true;
        }
        for &v in &slices[c] {
            for &a in modified.out_arcs(v) {
                let arc = modified.arc(a);
                if member[arc.target] {
                    arcs.push(SliceArc {
                        slice: c,
                        from: v,
                        to: arc.target,
                        weight: arc.weight,
                    });
                }
            }
        }
    }
    Ok(TimeExpandedGraph::from_slices(
        modified.vertices().to_vec(),
        slices,
        arcs,
        o,
        d,
        options.backward_prune,
        fallback,
    ))
}

/// Minimum-weight walk from `(0, o)` to `(c_max, d)` by dynamic programming
/// over the slices. Returns the vertex per slice and the total weight.
pub fn shortest_walk<T: Scalar>(x: &TimeExpandedGraph<T>) -> Option<(Vec<usize>, T)> {
    let n = x.vertices.len();
    let c_max = x.c_max();
    // best[c][v]: cheapest weight from (c, v) to (c_max, d), and the arc taken.
    let mut best: Vec<Vec<Option<(T, Option<usize>)>>> = vec![vec![None; n]; c_max + 1];
    best[c_max][x.destination] = Some((T::zero(), None));
    let mut by_slice: Vec<Vec<usize>> = vec![Vec::new(); c_max];
    for (i, a) in x.arcs.iter().enumerate() {
        by_slice[a.slice].push(i);
    }
    for c in (0..c_max).rev() {
        for &i in &by_slice[c] {
            let a = &x.arcs[i];
            if let Some((rest, _)) = best[c + 1][a.to] {
                let cand = a.weight + rest;
                if best[c][a.from].is_none_or(|(cur, _)| cand < cur) {
                    best[c][a.from] = Some((cand, Some(i)));
                }
            }
        }
    }
    let (total, _) = best[0][x.origin]?;
    let mut walk = vec![x.origin];
    let mut v = x.origin;
    for c in 0..c_max {
        let i = best[c][v].and_then(|(_, a)| a).expect("reachable state has a successor");
        v = x.arcs[i].to;
        walk.push(v);
    }
    Some((walk, total))
}

/// Every walk from `(0, o)` to `(c_max, d)` with its weight, or `None` when
/// there are more than `limit`.
pub fn enumerate_walks<T: Scalar>(x: &TimeExpandedGraph<T>, limit: usize) -> Option<Vec<(Vec<usize>, T)>> {
    let c_max = x.c_max();
    let mut by_source: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, a) in x.arcs.iter().enumerate() {
        by_source.entry((a.slice, a.from)).or_default().push(i);
    }
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, T)> = vec![(vec![x.origin], T::zero())];
    while let Some((walk, w)) = stack.pop() {
        let c = walk.len() - 1;
        let v = walk[c];
        if c == c_max {
            if v == x.destination {
                if out.len() == limit {
                    return None;
                }
                out.push((walk, w));
            }
            continue;
        }
        if let Some(next) = by_source.get(&(c, v)) {
            for &i in next.iter().rev() {
                let a = &x.arcs[i];
                let mut longer = walk.clone();
                longer.push(a.to);
                stack.push((longer, w + a.weight));
            }
        }
    }
    Some(out)
}

/// File form of a [`TimeExpandedGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionDocument {
    pub origin: String,
    pub destination: String,
    pub c_max: usize,
    pub vertices: Vec<String>,
    pub slices: Vec<Vec<String>>,
    pub arcs: Vec<SliceArcDocument>,
    pub backward_pruned: bool,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceArcDocument {
    pub c: usize,
    pub s: String,
    pub t: String,
    pub w: f64,
}

/// Per-slice weight replacement, as read from an overrides file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightOverride {
    pub c: usize,
    pub s: String,
    pub t: String,
    pub w: f64,
}

impl ExpansionDocument {
    pub fn from_expansion<T: Scalar>(x: &TimeExpandedGraph<T>) -> Self {
        ExpansionDocument {
            origin: x.vertex_name(x.origin).to_string(),
            destination: x.vertex_name(x.destination).to_string(),
            c_max: x.c_max(),
            vertices: x.vertices.clone(),
            slices: (0..=x.c_max())
                .map(|c| x.slice_names(c).into_iter().map(String::from).collect())
                .collect(),
            arcs: x
                .arcs
                .iter()
                .map(|a| SliceArcDocument {
                    c: a.slice,
                    s: x.vertex_name(a.from).to_string(),
                    t: x.vertex_name(a.to).to_string(),
                    w: a.weight.to_f64_lossy(),
                })
                .collect(),
            backward_pruned: x.backward_pruned,
            fallback: x.fallback,
        }
    }

    /// Rebuilds and validates the expansion.
    pub fn to_expansion<T: Scalar>(&self) -> Result<TimeExpandedGraph<T>, ExpansionError> {
        let bad = |m: String| ExpansionError::Malformed(m);
        let index: HashMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        if index.len() != self.vertices.len() {
            return Err(bad("duplicate vertex names".into()));
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| bad(format!("unknown vertex {name:?}")))
        };
        let origin = lookup(&self.origin)?;
        let destination = lookup(&self.destination)?;
        if origin == destination {
            return Err(bad("origin equals destination".into()));
        }
        if self.slices.len() != self.c_max + 1 || self.c_max == 0 {
            return Err(bad(format!("{} slices for c_max {}", self.slices.len(), self.c_max)));
        }
        let mut slices = Vec::with_capacity(self.slices.len());
        for (c, names) in self.slices.iter().enumerate() {
            let mut ids = names.iter().map(|v| lookup(v)).collect::<Result<Vec<_>, _>>()?;
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(bad(format!("slice {c} repeats a vertex")));
            }
            slices.push(ids);
        }
        if slices[0] != [origin] {
            return Err(bad("slice 0 must hold exactly the origin".into()));
        }
        if !slices[self.c_max].contains(&destination) {
            return Err(bad("last slice must contain the destination".into()));
        }
        let mut arcs = Vec::with_capacity(self.arcs.len());
        let mut seen = std::collections::HashSet::new();
        for a in &self.arcs {
            let (from, to) = (lookup(&a.s)?, lookup(&a.t)?);
            if a.c >= self.c_max || !slices[a.c].contains(&from) || !slices[a.c + 1].contains(&to) {
                return Err(bad(format!("arc {}->{} does not join slices {} and {}", a.s, a.t, a.c, a.c + 1)));
            }
            if !seen.insert((a.c, from, to)) {
                return Err(bad(format!("duplicate arc {}->{} at slice {}", a.s, a.t, a.c)));
            }
            let zero_ok = from == destination && to == destination;
            if !a.w.is_finite() || a.w < 0.0 || (a.w == 0.0 && !zero_ok) {
                return Err(ExpansionError::InvalidWeight {
                    slice: a.c,
                    source_id: a.s.clone(),
                    target_id: a.t.clone(),
                    weight: a.w,
                });
            }
            arcs.push(SliceArc {
                slice: a.c,
                from,
                to,
                weight: T::from_f64_lossy(a.w),
            });
        }
        Ok(TimeExpandedGraph::from_slices(
            self.vertices.clone(),
            slices,
            arcs,
            origin,
            destination,
            self.backward_pruned,
            self.fallback,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_graph;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn slice_set(x: &TimeExpandedGraph<f64>, c: usize) -> BTreeSet<String> {
        x.slice_names(c).into_iter().map(String::from).collect()
    }

    #[test]
    fn modification_of_sample() {
        let g = sample_graph();
        let m = modify_for_expansion(&g, "d").unwrap();
        let d = m.vertex_index("d").unwrap();
        let eight = m.vertex_index("8").unwrap();
        assert_eq!(m.arc_between(d, eight), None);
        assert_eq!(m.weight_between(d, d), Some(0.0));
        assert_eq!(m.out_arcs(d).len(), 1);
        assert_eq!(m.num_arcs(), 17);
    }

    #[test]
    fn modification_without_destination_arcs() {
        let g = WeightedDigraph::from_parts(&["o", "d"], &[("o", "d", 1.0)]).unwrap();
        let m = modify_for_expansion(&g, "d").unwrap();
        assert_eq!(m.num_arcs(), 2);
        assert_eq!(m.weight_between(1, 1), Some(0.0));
    }

    #[test]
    fn modification_resets_existing_loop() {
        let g = WeightedDigraph::from_parts(&["o", "d"], &[("o", "d", 1.0), ("d", "d", 5.0), ("d", "o", 2.0)])
            .unwrap();
        let m = modify_for_expansion(&g, "d").unwrap();
        assert_eq!(m.num_arcs(), 2);
        assert_eq!(m.weight_between(1, 1), Some(0.0));
        assert_eq!(m.arc_between(1, 0), None);
    }

    #[test]
    fn sample_sliced_slices() {
        let x = expand(&sample_graph(), &RouteQuery::new("o", "d"), ExpansionOptions::default()).unwrap();
        assert_eq!(x.c_max(), 5);
        assert_eq!(slice_set(&x, 0), set(&["o"]));
        assert_eq!(slice_set(&x, 1), set(&["5", "1", "2", "3"]));
        assert_eq!(slice_set(&x, 2), set(&["1", "6", "d", "2", "4"]));
        assert_eq!(slice_set(&x, 3), set(&["8", "6", "d", "4", "7"]));
        assert_eq!(slice_set(&x, 4), set(&["8", "d", "7"]));
        assert_eq!(slice_set(&x, 5), set(&["d"]));
        assert_eq!(x.total_slots(), 19);
        assert!(!x.is_fallback());
        // 28 arcs are drawn between consecutive slices.
        assert_eq!(x.arcs().len(), 28);
    }

    #[test]
    fn backward_pruning_drops_dead_ends() {
        let opts = ExpansionOptions {
            backward_prune: true,
            ..Default::default()
        };
        let x = expand(&sample_graph(), &RouteQuery::new("o", "d"), opts).unwrap();
        assert_eq!(slice_set(&x, 3), set(&["6", "d", "4", "7"]));
        assert_eq!(slice_set(&x, 4), set(&["d", "7"]));
        assert_eq!(x.total_slots(), 17);
    }

    #[test]
    fn minimal_graph() {
        let g = WeightedDigraph::from_parts(&["o", "d"], &[("o", "d", 1.0)]).unwrap();
        let x = expand(&g, &RouteQuery::new("o", "d"), ExpansionOptions::default()).unwrap();
        assert_eq!(x.c_max(), 1);
        assert_eq!(x.slice_names(0), ["o"]);
        assert_eq!(x.slice_names(1), ["d"]);
    }

    #[test]
    fn cycle_falls_back_to_vertex_budget() {
        // o -> a -> b -> o with b -> d: the cycle keeps feeding the frontier, so
        // no slice ever equals {d}.
        let g = WeightedDigraph::from_parts(
            &["o", "a", "b", "d"],
            &[("o", "a", 1.0), ("a", "b", 1.0), ("b", "o", 1.0), ("b", "d", 1.0)],
        )
        .unwrap();
        let q = RouteQuery::new("o", "d");
        let x = expand(&g, &q, ExpansionOptions::default()).unwrap();
        assert_eq!(x.c_max(), 3);
        assert!(x.is_fallback());
        assert_eq!(slice_set(&x, 3), set(&["o", "d"]));
        for steps in 1..40 {
            let y = expand(
                &g,
                &q,
                ExpansionOptions {
                    limit: SliceLimit::Exact(steps),
                    backward_prune: false,
                },
            );
            if let Ok(y) = y {
                assert_ne!(y.slice_names(steps), ["d"]);
            }
        }
        assert_eq!(
            expand(
                &g,
                &q,
                ExpansionOptions {
                    limit: SliceLimit::Hint(2),
                    backward_prune: false
                }
            ),
            Err(ExpansionError::BudgetExhausted {
                c_max: 2,
                destination: "d".into()
            })
        );
    }

    #[test]
    fn unreachable_destination() {
        let g = WeightedDigraph::from_parts(&["o", "d"], &[("d", "o", 1.0)]).unwrap();
        assert!(matches!(
            expand(&g, &RouteQuery::new("o", "d"), ExpansionOptions::default()),
            Err(ExpansionError::Unreachable { .. })
        ));
    }

    #[test]
    fn document_roundtrip_and_overrides() {
        let x = expand(&sample_graph(), &RouteQuery::new("o", "d"), ExpansionOptions::default()).unwrap();
        let doc = ExpansionDocument::from_expansion(&x);
        let back: TimeExpandedGraph<f64> = doc.to_expansion().unwrap();
        assert_eq!(back, x);
        let y = x
            .with_weight_overrides(&[(1, "2".into(), "4".into(), 7.0)])
            .unwrap();
        let (two, four) = (x.vertex_index("2").unwrap(), x.vertex_index("4").unwrap());
        assert_eq!(y.arc_weight(1, two, four), Some(7.0));
        assert_eq!(y.arc_weight(2, two, four), Some(1.0));
        assert!(x.with_weight_overrides(&[(0, "2".into(), "4".into(), 7.0)]).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = WeightedDigraph<f64>> {
        (3usize..=10).prop_flat_map(|n| {
            proptest::collection::btree_set((0..n, 0..n), 1..=3 * n).prop_map(move |arcs| {
                let mut g = WeightedDigraph::new();
                for i in 0..n {
                    g.add_vertex(&i.to_string()).unwrap();
                }
                for (s, t) in arcs {
                    g.add_arc_by_index(s, t, 1.0 + (s * 7 + t) as f64 % 5.0).unwrap();
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn slices_are_exact_hop_layers(g in arb_graph()) {
            let d = (g.num_vertices() - 1).to_string();
            let q = RouteQuery::new("0", d.clone());
            let Ok(x) = expand(&g, &q, ExpansionOptions::default()) else { return Ok(()); };
            let m = modify_for_expansion(&g, &d).unwrap();
            // Walk-layer oracle: layer c = vertices reachable in exactly c steps.
            let mut layer = vec![false; g.num_vertices()];
            layer[0] = true;
            for c in 0..=x.c_max() {
                let expected: Vec<usize> = (0..g.num_vertices()).filter(|&v| layer[v]).collect();
                prop_assert_eq!(x.slice(c), expected.as_slice());
                let mut next = vec![false; g.num_vertices()];
                for a in m.arcs() {
                    if layer[a.source] { next[a.target] = true; }
                }
                layer = next;
            }
            let dest = x.destination();
            let first = (0..=x.c_max()).find(|&c| x.slice(c).contains(&dest)).unwrap();
            for c in first..=x.c_max() {
                prop_assert!(x.slice(c).contains(&dest));
            }
            prop_assert!(x.total_slots() <= (x.c_max() + 1) * g.num_vertices());
            for a in x.arcs() {
                prop_assert!(m.arc_between(a.from, a.to).is_some());
            }
        }

        #[test]
        fn pruned_vertices_reach_destination(g in arb_graph()) {
            let d = (g.num_vertices() - 1).to_string();
            let q = RouteQuery::new("0", d);
            let opts = ExpansionOptions { limit: SliceLimit::Auto, backward_prune: true };
            let Ok(x) = expand(&g, &q, opts) else { return Ok(()); };
            prop_assert_eq!(x.slice(x.c_max()), &[x.destination()][..]);
            for c in 0..x.c_max() {
                for &v in x.slice(c) {
                    prop_assert!(x.arcs().iter().any(|a| a.slice == c && a.from == v));
                }
            }
        }
    }
}
