//! Classical reference algorithms. Nothing here touches QUBO code, so these
//! can serve as independent checks on the compiled formulations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{GraphError, RouteQuery, WeightedDigraph};
use crate::Scalar;

/// A path as a list of arc ids, with its total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    pub arcs: Vec<usize>,
    pub weight: T,
}

impl<T: Scalar> Path<T> {
    /// Vertex sequence of the path, starting at the source of the first arc.
    pub fn vertices(&self, g: &WeightedDigraph<T>) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.arcs.len() + 1);
        if let Some(&first) = self.arcs.first() {
            out.push(g.arc(first).source);
        }
        out.extend(self.arcs.iter().map(|&a| g.arc(a).target));
        out
    }

    pub fn vertex_names(&self, g: &WeightedDigraph<T>) -> Vec<String> {
        self.vertices(g).into_iter().map(|v| g.vertex_name(v).to_string()).collect()
    }
}

struct HeapEntry<T> {
    dist: T,
    vertex: usize,
}

impl<T: PartialOrd> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: PartialOrd> Eq for HeapEntry<T> {}
impl<T: PartialOrd> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: PartialOrd> Ord for HeapEntry<T> {
    // Min-heap on distance, then vertex index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Arcs and vertices excluded from a search.
struct Bans {
    arcs: Vec<bool>,
    vertices: Vec<bool>,
}

impl Bans {
    fn none<T: Scalar>(g: &WeightedDigraph<T>) -> Self {
        Bans {
            arcs: vec![false; g.num_arcs()],
            vertices: vec![false; g.num_vertices()],
        }
    }
}

/// Single-source shortest distances following arcs forward. Self-loops are
/// ignored.
pub fn distances_from<T: Scalar>(g: &WeightedDigraph<T>, source: usize) -> Vec<Option<T>> {
    let mut dist: Vec<Option<T>> = vec![None; g.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(T::zero());
    heap.push(HeapEntry { dist: T::zero(), vertex: source });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if dist[v].is_some_and(|best| d > best) {
            continue;
        }
        for &a in g.out_arcs(v) {
            let arc = g.arc(a);
            if arc.target == v {
                continue;
            }
            let nd = d + arc.weight;
            if dist[arc.target].is_none_or(|cur| nd < cur) {
                dist[arc.target] = Some(nd);
                heap.push(HeapEntry { dist: nd, vertex: arc.target });
            }
        }
    }
    dist
}

/// Shortest distance from every vertex to `target`, honoring bans.
fn distances_to<T: Scalar>(g: &WeightedDigraph<T>, target: usize, bans: &Bans) -> Vec<Option<T>> {
    let mut dist: Vec<Option<T>> = vec![None; g.num_vertices()];
    if bans.vertices[target] {
        return dist;
    }
    let mut heap = BinaryHeap::new();
    dist[target] = Some(T::zero());
    heap.push(HeapEntry { dist: T::zero(), vertex: target });
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if dist[v].is_some_and(|best| d > best) {
            continue;
        }
        for &a in g.in_arcs(v) {
            let arc = g.arc(a);
            if arc.source == v || bans.arcs[a] || bans.vertices[arc.source] {
                continue;
            }
            let nd = d + arc.weight;
            if dist[arc.source].is_none_or(|cur| nd < cur) {
                dist[arc.source] = Some(nd);
                heap.push(HeapEntry { dist: nd, vertex: arc.source });
            }
        }
    }
    dist
}

/// Minimum-weight path from `source` to `target`, choosing among equal-weight
/// paths the lexicographically smallest arc-id sequence.
fn shortest_path_with_bans<T: Scalar>(
    g: &WeightedDigraph<T>,
    source: usize,
    target: usize,
    bans: &Bans,
) -> Option<Path<T>> {
    if bans.vertices[source] {
        return None;
    }
    let dist = distances_to(g, target, bans);
    let total = dist[source]?;
    let tol = T::epsilon() * T::of_usize(8 * (g.num_vertices() + 1)) * (T::one() + total);
    let mut arcs = Vec::new();
    let mut weight = T::zero();
    let mut v = source;
    while v != target {
        let here = dist[v].expect("on a shortest path");
        // Arc ids are scanned in increasing order, so the first match is the
        // lexicographic choice.
        let mut ids: Vec<usize> = g.out_arcs(v).to_vec();
        ids.sort_unstable();
        let next = ids
            .into_iter()
            .filter(|&a| {
                let arc = g.arc(a);
                arc.target != v && !bans.arcs[a] && !bans.vertices[arc.target]
            })
            .find(|&a| {
                let arc = g.arc(a);
                dist[arc.target].is_some_and(|rest| (arc.weight + rest - here).abs() <= tol)
            })
            .expect("a tight arc leaves every vertex on a shortest path");
        arcs.push(next);
        weight += g.arc(next).weight;
        v = g.arc(next).target;
    }
    Some(Path { arcs, weight })
}

/// Minimum-weight `origin -> destination` path, or `None` if unreachable.
///
/// Ties are broken by the lexicographic order of the arc-id sequence.
pub fn dijkstra<T: Scalar>(g: &WeightedDigraph<T>, q: &RouteQuery) -> Result<Option<Path<T>>, GraphError> {
    let (o, d) = q.resolve(g)?;
    Ok(shortest_path_with_bans(g, o, d, &Bans::none(g)))
}

/// All simple `origin -> destination` paths with at most `max_len` arcs, in
/// depth-first order over arc insertion order.
pub fn enumerate_simple_paths<T: Scalar>(
    g: &WeightedDigraph<T>,
    q: &RouteQuery,
    max_len: usize,
) -> Result<Vec<Path<T>>, GraphError> {
    if max_len == 0 {
        return Err(GraphError::ZeroMaxLength);
    }
    let (o, d) = q.resolve(g)?;
    let mut out = Vec::new();
    let mut on_path = vec![false; g.num_vertices()];
    let mut stack = Vec::new();
    on_path[o] = true;
    dfs(g, o, d, max_len, &mut on_path, &mut stack, &mut out);
    Ok(out)
}

fn dfs<T: Scalar>(
    g: &WeightedDigraph<T>,
    v: usize,
    d: usize,
    max_len: usize,
    on_path: &mut [bool],
    stack: &mut Vec<usize>,
    out: &mut Vec<Path<T>>,
) {
    if v == d {
        out.push(Path {
            arcs: stack.clone(),
            weight: stack.iter().map(|&a| g.arc(a).weight).sum(),
        });
        return;
    }
    if stack.len() == max_len {
        return;
    }
    for &a in g.out_arcs(v) {
        let t = g.arc(a).target;
        if on_path[t] {
            continue;
        }
        on_path[t] = true;
        stack.push(a);
        dfs(g, t, d, max_len, on_path, stack, out);
        stack.pop();
        on_path[t] = false;
    }
}

/// Up to `k` shortest simple paths in non-decreasing weight order (Yen).
pub fn k_shortest_paths<T: Scalar>(
    g: &WeightedDigraph<T>,
    q: &RouteQuery,
    k: usize,
) -> Result<Vec<Path<T>>, GraphError> {
    let (o, d) = q.resolve(g)?;
    let mut found: Vec<Path<T>> = Vec::new();
    if k == 0 {
        return Ok(found);
    }
    let Some(first) = shortest_path_with_bans(g, o, d, &Bans::none(g)) else {
        return Ok(found);
    };
    found.push(first);
    let mut candidates: Vec<Path<T>> = Vec::new();
    while found.len() < k {
        let last = found.last().unwrap().clone();
        let last_vertices = last.vertices(g);
        for spur_idx in 0..last.arcs.len() {
            let spur = last_vertices[spur_idx];
            let root = &last.arcs[..spur_idx];
            let mut bans = Bans::none(g);
            for p in &found {
                if p.arcs.len() > spur_idx && p.arcs[..spur_idx] == *root {
                    bans.arcs[p.arcs[spur_idx]] = true;
                }
            }
            for &v in &last_vertices[..spur_idx] {
                bans.vertices[v] = true;
            }
            if let Some(tail) = shortest_path_with_bans(g, spur, d, &bans) {
                let mut arcs = root.to_vec();
                arcs.extend(tail.arcs);
                let weight = arcs.iter().map(|&a| g.arc(a).weight).sum();
                let cand = Path { arcs, weight };
                if !candidates.iter().any(|c| c.arcs == cand.arcs) && !found.iter().any(|c| c.arcs == cand.arcs) {
                    candidates.push(cand);
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let best = (0..candidates.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&candidates[a], &candidates[b]);
                pa.weight
                    .partial_cmp(&pb.weight)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| pa.arcs.cmp(&pb.arcs))
            })
            .unwrap();
        found.push(candidates.swap_remove(best));
    }
    Ok(found)
}

/// Fewest-arc distance from `source` to every vertex.
pub fn hop_distances<T: Scalar>(g: &WeightedDigraph<T>, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_vertices()];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap();
        for &a in g.out_arcs(v) {
            let t = g.arc(a).target;
            if dist[t].is_none() {
                dist[t] = Some(dv + 1);
                queue.push_back(t);
            }
        }
    }
    dist
}

/// A closed tour listed from the start vertex, without repeating it.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour<T> {
    pub vertices: Vec<usize>,
    pub weight: T,
}

/// Every Hamiltonian cycle through `start`, by enumerating the permutations of
/// the remaining vertices.
pub fn all_tours<T: Scalar>(g: &WeightedDigraph<T>, start: usize) -> Vec<Tour<T>> {
    let rest: Vec<usize> = (0..g.num_vertices()).filter(|&v| v != start).collect();
    let mut out = Vec::new();
    let mut perm = rest.clone();
    permute(&mut perm, 0, &mut |order| {
        let mut weight = T::zero();
        let mut prev = start;
        for &v in order.iter().chain(std::iter::once(&start)) {
            match g.weight_between(prev, v) {
                Some(w) if prev != v => weight += w,
                _ => return,
            }
            prev = v;
        }
        let mut vertices = vec![start];
        vertices.extend_from_slice(order);
        out.push(Tour { vertices, weight });
    });
    out
}

/// Minimum-weight Hamiltonian cycle through `start` by brute force.
pub fn tsp_brute_force<T: Scalar>(g: &WeightedDigraph<T>, start: usize) -> Option<Tour<T>> {
    all_tours(g, start).into_iter().min_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.vertices.cmp(&b.vertices))
    })
}

// Heap's algorithm would reorder; plain recursive swapping keeps it simple.
fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
