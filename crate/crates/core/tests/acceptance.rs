//! Acceptance checks. Runs as a plain binary and prints one PASS/FAIL line per
//! criterion; exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex;
use quborouter::expansion::expand;
use quborouter::formulation::{
    compile_multi, compile_single, compile_sliced, compile_tsp, decode_multi, decode_single, decode_sliced,
    subdivide_for_speed, FleetProblem, FormulationError, SingleOptions, Vehicle,
};
use quborouter::graph::sample_graph;
use quborouter::harness::gen::{generate, GenOptions, GraphFamily};
use quborouter::harness::{solve_problem, to_json_text, ProblemFile, ProblemSource};
use quborouter::qubo::state_to_bits;
use quborouter::solvers::{solve_exact, solve_qaoa, Backend, QaoaConfig, QaoaSimulator, SolveConfig};
use quborouter::{
    Digraph, ExpansionOptions, Literal, Penalty, Qubo, QuboPolynomial, RouteQuery, SliceLimit, WeightedDigraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn main() {
    let criteria: [(&str, u64, fn()); 10] = [
        ("variable counts", 1, variable_counts),
        ("single-vehicle optimality", 120, single_vehicle),
        ("time-expansion slices", 1, expansion_slices),
        ("sliced-model equivalence", 300, sliced_equivalence),
        ("tour oracle equivalence", 300, tour_equivalence),
        ("fleet correctness", 300, fleet_correctness),
        ("subdivision isometry", 60, subdivision_isometry),
        ("statevector validity", 180, statevector_validity),
        ("flow-balance regression", 1, flow_balance_regression),
        ("reproducibility", 300, reproducibility),
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let took = started.elapsed();
        let within = took <= Duration::from_secs(*budget);
        let ok = outcome.is_ok() && within;
        if !ok {
            failed += 1;
        }
        let note = if outcome.is_ok() && !within {
            format!(" (over the {budget} s budget)")
        } else {
            String::new()
        };
        println!(
            "{} criterion {:>2}: {name} [{:.2} s]{note}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- oracles

/// Bellman-Ford distances from `s`.
fn bellman_ford(g: &Digraph, s: usize) -> Vec<Option<f64>> {
    let mut dist = vec![None; g.num_vertices()];
    dist[s] = Some(0.0);
    for _ in 0..g.num_vertices() {
        let mut changed = false;
        for a in g.arcs() {
            if let Some(ds) = dist[a.source] {
                let cand = ds + a.weight;
                if dist[a.target].is_none_or(|dt: f64| cand < dt) {
                    dist[a.target] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Fewest arcs over all minimum-weight `s`-`t` paths.
fn min_hops_of_shortest(g: &Digraph, s: usize, t: usize) -> Option<usize> {
    let n = g.num_vertices();
    // (weight, hops) lexicographic relaxation.
    let mut best: Vec<Option<(f64, usize)>> = vec![None; n];
    best[s] = Some((0.0, 0));
    for _ in 0..n {
        for a in g.arcs() {
            if let Some((w, h)) = best[a.source] {
                let cand = (w + a.weight, h + 1);
                let better = match best[a.target] {
                    None => true,
                    Some((bw, bh)) => cand.0 < bw - TOL || ((cand.0 - bw).abs() <= TOL && cand.1 < bh),
                };
                if better {
                    best[a.target] = Some(cand);
                }
            }
        }
    }
    best[t].map(|(_, h)| h)
}

fn floyd_warshall(g: &Digraph) -> Vec<Vec<f64>> {
    let n = g.num_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for a in g.arcs() {
        d[a.source][a.target] = d[a.source][a.target].min(a.weight);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every Hamiltonian cycle from `start`, as the vertex order after `start`.
fn all_tours(g: &Digraph, start: usize) -> BTreeMap<Vec<usize>, f64> {
    fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, out);
            items.swap(k, i);
        }
    }
    let mut rest: Vec<usize> = (0..g.num_vertices()).filter(|&v| v != start).collect();
    let mut perms = Vec::new();
    permute(&mut rest, 0, &mut perms);
    let mut tours = BTreeMap::new();
    for p in perms {
        let mut cycle = vec![start];
        cycle.extend(&p);
        cycle.push(start);
        let w: Option<f64> = cycle.windows(2).map(|e| g.weight_between(e[0], e[1])).sum();
        if let Some(w) = w {
            tours.insert(p, w);
        }
    }
    tours
}

/// Walks of exactly `steps` arcs from `o` that end parked at `d`. The walk
/// may not leave `d` once there.
fn parked_walks(g: &Digraph, o: usize, d: usize, steps: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(g: &Digraph, d: usize, steps: usize, walk: &mut Vec<usize>, w: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        let v = *walk.last().unwrap();
        if walk.len() == steps + 1 {
            if v == d {
                out.push((walk.clone(), w));
            }
            return;
        }
        if v == d {
            walk.push(d);
            go(g, d, steps, walk, w, out);
            walk.pop();
            return;
        }
        for a in g.arcs().iter().filter(|a| a.source == v && a.target != v) {
            walk.push(a.target);
            go(g, d, steps, walk, w + a.weight, out);
            walk.pop();
        }
    }
    let mut out = Vec::new();
    go(g, d, steps, &mut vec![o], 0.0, &mut out);
    out
}

fn brute_minimum(p: &Qubo) -> f64 {
    (0..1u64 << p.num_vars())
        .map(|s| p.evaluate_state(s))
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------- corpus

/// 200 strongly connected graphs with 3..=8 vertices and at most 16 arcs;
/// the query runs from `v0` to the last vertex.
fn corpus() -> Vec<(Digraph, RouteQuery)> {
    (0..200u64)
        .map(|seed| {
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
            (g, RouteQuery::new("v0", format!("v{}", n - 1)))
        })
        .collect()
}

// ---------------------------------------------------------------- criteria

fn variable_counts() {
    let sample = sample_graph();
    let c = compile_single(
        &sample,
        &RouteQuery::new("o", "d"),
        Penalty::default_for(&sample),
        SingleOptions::default(),
    )
    .unwrap();
    assert_eq!(c.polynomial.num_vars(), 17);
    assert_eq!(sample.num_arcs(), 17);

    let k4 = generate(GraphFamily::Complete, 4, None, 0, GenOptions::default());
    let t = compile_tsp(&k4, "v0", Penalty::default_for(&k4), false).unwrap();
    assert_eq!(t.polynomial.num_vars(), 9);

    let cycle = WeightedDigraph::from_parts(
        &["a", "b", "c", "e"],
        &[("a", "b", 1.0), ("b", "c", 1.0), ("c", "e", 1.0), ("e", "a", 1.0)],
    )
    .unwrap();
    let t = compile_tsp(&cycle, "a", Penalty::default_for(&cycle), true).unwrap();
    assert!(t.polynomial.num_vars() < 9, "{}", t.polynomial.num_vars());
}

fn single_vehicle() {
    for (g, q) in corpus() {
        let (o, d) = q.resolve(&g).unwrap();
        let c = compile_single(&g, &q, Penalty::default_for(&g), SingleOptions::default()).unwrap();
        let p = c.penalty.value();
        let r = solve_exact(&c.polynomial).unwrap();
        let dec = decode_single(&c, &r.bits).unwrap();
        assert!(dec.is_feasible(), "{:?}", dec.violations);
        let opt = bellman_ford(&g, o)[d].unwrap();
        assert!((dec.weight - opt).abs() <= TOL && (r.value - opt).abs() <= TOL);
        let route: Vec<usize> = dec.vertices.iter().map(|n| g.vertex_index(n).unwrap()).collect();
        assert_eq!((route[0], *route.last().unwrap()), (o, d));
        assert_eq!(route.iter().collect::<BTreeSet<_>>().len(), route.len(), "not simple");

        // Every bitstring that breaks a degree or balance condition costs at
        // least P more than the optimum.
        let n = g.num_arcs();
        assert!(n <= 16);
        let mask = |ids: &[usize]| ids.iter().fold(0u64, |m, &a| m | 1 << c.var_of_arc(a));
        let outs: Vec<u64> = (0..g.num_vertices()).map(|v| mask(g.out_arcs(v))).collect();
        let ins: Vec<u64> = (0..g.num_vertices()).map(|v| mask(g.in_arcs(v))).collect();
        for s in 0..1u64 << n {
            let deg = |m: u64| (s & m).count_ones();
            let mut bad = deg(outs[o]) != 1 || deg(ins[o]) != 0 || deg(ins[d]) != 1 || deg(outs[d]) != 0;
            for v in (0..g.num_vertices()).filter(|&v| v != o && v != d) {
                let (i, t) = (deg(ins[v]), deg(outs[v]));
                bad |= i > 1 || t > 1 || i != t;
            }
            let val = c.polynomial.evaluate_state(s);
            if bad {
                assert!(val >= opt + p - TOL, "state {s:b}: {val} < {opt} + {p}");
            } else {
                assert!(val >= opt - TOL);
            }
        }
    }
}

fn expansion_slices() {
    let x = expand(&sample_graph(), &RouteQuery::new("o", "d"), ExpansionOptions::default()).unwrap();
    let names = |c: usize| x.slice_names(c).into_iter().map(String::from).collect::<BTreeSet<_>>();
    let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    assert_eq!(x.c_max(), 5);
    assert_eq!(names(0), set(&["o"]));
    assert_eq!(names(1), set(&["5", "1", "2", "3"]));
    assert_eq!(names(2), set(&["1", "6", "d", "2", "4"]));
    assert_eq!(names(3), set(&["8", "6", "d", "4", "7"]));
    assert_eq!(names(4), set(&["8", "d", "7"]));
    assert_eq!(names(5), set(&["d"]));
    assert_eq!((0..=5).map(|c| x.slice(c).len()).sum::<usize>(), 19);
}

fn sliced_equivalence() {
    let (mut checked, mut pruned, mut skipped, mut too_long) = (0, 0, 0, 0);
    for (g, q) in corpus() {
        let (o, d) = q.resolve(&g).unwrap();
        let default = expand(&g, &q, ExpansionOptions::default()).unwrap();
        let hops = min_hops_of_shortest(&g, o, d).unwrap();
        if hops > default.c_max() {
            too_long += 1;
            continue;
        }
        let mut x = default;
        let mut c = compile_sliced(&x, Penalty::default_for_expansion(&x)).unwrap();
        if c.polynomial.num_vars() > 26 {
            x = expand(
                &g,
                &q,
                ExpansionOptions {
                    limit: SliceLimit::Exact(x.c_max()),
                    backward_prune: true,
                },
            )
            .unwrap();
            c = compile_sliced(&x, Penalty::default_for_expansion(&x)).unwrap();
            if c.polynomial.num_vars() > 26 {
                skipped += 1;
                continue;
            }
            pruned += 1;
        }
        let r = solve_exact(&c.polynomial).unwrap();
        let opt = bellman_ford(&g, o)[d].unwrap();
        assert!((r.value - opt).abs() <= TOL, "{} vs {opt}", r.value);
        let dec = decode_sliced(&c, &r.bits).unwrap();
        assert!(dec.is_feasible(), "{:?}", dec.violations);
        let route: Vec<usize> = dec.vertices.iter().map(|n| g.vertex_index(n).unwrap()).collect();
        assert_eq!((route[0], *route.last().unwrap()), (o, d));
        let w: f64 = route.windows(2).map(|e| g.weight_between(e[0], e[1]).unwrap()).sum();
        assert!((w - opt).abs() <= TOL);
        checked += 1;
    }
    println!(
        "  sliced: {checked} solved ({pruned} via backward pruning), {skipped} over the exact-solver budget, \
         {too_long} with the shortest path longer than c_max"
    );
    assert!(checked >= 190);
}

/// Tours encoded by low-energy states, read with an independent decoder.
fn encoded_tours(c: &quborouter::formulation::TspCompilation<f64>) -> BTreeMap<Vec<usize>, f64> {
    let g = &c.graph;
    let n = c.polynomial.num_vars();
    let mut tours = BTreeMap::new();
    'state: for s in 0..1u64 << n {
        let bits = state_to_bits(s, n);
        let mut order = Vec::new();
        for slot in &c.slots {
            let on: Vec<usize> = slot
                .iter()
                .filter(|(_, l)| match *l {
                    Literal::Fixed(b) => b,
                    Literal::Var(k) => bits[k],
                })
                .map(|&(v, _)| v)
                .collect();
            if on.len() != 1 {
                continue 'state;
            }
            order.push(on[0]);
        }
        let inner = &order[1..order.len() - 1];
        let distinct: BTreeSet<_> = inner.iter().collect();
        if order[0] != c.start || *order.last().unwrap() != c.start || distinct.len() != g.num_vertices() - 1 {
            continue;
        }
        if inner.contains(&c.start) {
            continue;
        }
        let w: Option<f64> = order.windows(2).map(|e| g.weight_between(e[0], e[1])).sum();
        if let Some(w) = w {
            assert!((c.polynomial.evaluate_state(s) - w).abs() <= TOL);
            tours.insert(inner.to_vec(), w);
        }
    }
    tours
}

fn tour_equivalence() {
    let mut without = 0;
    for seed in 0..50u64 {
        let n = 4 + (seed as usize % 2);
        let arcs = n + (seed as usize * 7) % (n * (n - 1) - n + 1);
        let g = generate(
            GraphFamily::Connected,
            n,
            None,
            1000 + seed,
            GenOptions {
                arcs: Some(arcs),
                ..GenOptions::default()
            },
        );
        let truth = all_tours(&g, 0);
        let off = compile_tsp(&g, "v0", Penalty::default_for(&g), false).unwrap();
        let tours_off = encoded_tours(&off);
        assert_eq!(tours_off.keys().collect::<Vec<_>>(), truth.keys().collect::<Vec<_>>());
        let r = solve_exact(&off.polynomial).unwrap();
        match truth.values().copied().reduce(f64::min) {
            Some(best) => {
                assert!((r.value - best).abs() <= TOL);
                let on = compile_tsp(&g, "v0", Penalty::default_for(&g), true).unwrap();
                assert!(on.polynomial.num_vars() <= off.polynomial.num_vars());
                assert_eq!(encoded_tours(&on), tours_off);
                let r = solve_exact(&on.polynomial).unwrap();
                assert!((r.value - best).abs() <= TOL);
            }
            None => {
                without += 1;
                assert!(r.value >= off.penalty.value() - TOL);
                match compile_tsp(&g, "v0", Penalty::default_for(&g), true) {
                    Err(FormulationError::NoTour(_)) => {}
                    Ok(on) => assert!(encoded_tours(&on).is_empty()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
    println!("  tours: 50 graphs, {without} without a Hamiltonian cycle");
}

fn fleet_of(g: &Digraph, pairs: &[(usize, usize)], c_max: Option<usize>) -> FleetProblem<f64> {
    FleetProblem {
        base: g.clone(),
        vehicles: pairs
            .iter()
            .enumerate()
            .map(|(i, &(o, d))| Vehicle {
                id: format!("{}", i + 1),
                query: RouteQuery::new(g.vertex_name(o), g.vertex_name(d)),
                subgraph: g.clone(),
            })
            .collect(),
        c_max,
    }
}

/// Cheapest pair of parked walks that never share a vertex after slice 0.
fn joint_brute_force(g: &Digraph, pairs: &[(usize, usize)], steps: usize) -> Option<f64> {
    let a = parked_walks(g, pairs[0].0, pairs[0].1, steps);
    let b = parked_walks(g, pairs[1].0, pairs[1].1, steps);
    let mut best: Option<f64> = None;
    for (wa, ca) in &a {
        for (wb, cb) in &b {
            if (1..=steps).all(|c| wa[c] != wb[c]) {
                best = Some(best.map_or(ca + cb, |x: f64| x.min(ca + cb)));
            }
        }
    }
    best
}

fn fleet_correctness() {
    let mut done = 0;
    let mut seed = 0u64;
    while done < 30 {
        assert!(seed < 5000, "ran out of seeds after {done} instances");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=6);
        let g = generate(
            GraphFamily::Connected,
            n,
            None,
            seed,
            GenOptions {
                arcs: Some(rng.gen_range(n..=2 * n)),
                ..GenOptions::default()
            },
        );
        seed += 1;
        let mut pick = || rng.gen_range(0..n);
        let pairs = [(pick(), pick()), (pick(), pick())];
        if pairs[0].0 == pairs[0].1
            || pairs[1].0 == pairs[1].1
            || pairs[0].0 == pairs[1].0
            || pairs[0].1 == pairs[1].1
        {
            continue;
        }
        let f = fleet_of(&g, &pairs, None);
        let c = compile_multi(&f, None).unwrap();
        if c.polynomial.num_vars() > 20 {
            continue;
        }
        let Some(best) = joint_brute_force(&g, &pairs, c.c_max) else {
            assert!(brute_minimum(&c.polynomial) >= c.penalty.value() - TOL);
            continue;
        };
        let r = solve_exact(&c.polynomial).unwrap();
        assert!((r.value - best).abs() <= TOL, "seed {}: {} vs {best}", seed - 1, r.value);
        let dec = decode_multi(&c, &r.bits).unwrap();
        assert!(dec.is_feasible());
        assert!((dec.total_weight() - best).abs() <= TOL);
        done += 1;
    }
    println!("  fleet: 30 instances from {seed} seeds");

    // Swapped endpoints on a two-way 4-cycle.
    let mut ring = WeightedDigraph::new();
    for v in ["a", "b", "c", "e"] {
        ring.add_vertex(v).unwrap();
    }
    for (s, t) in [("a", "b"), ("b", "c"), ("c", "e"), ("e", "a")] {
        ring.add_arc(s, t, 1.0).unwrap();
        ring.add_arc(t, s, 1.0).unwrap();
    }
    let (a, c_) = (ring.vertex_index("a").unwrap(), ring.vertex_index("c").unwrap());
    let f = fleet_of(&ring, &[(a, c_), (c_, a)], None);
    let c = compile_multi(&f, None).unwrap();
    let r = solve_exact(&c.polynomial).unwrap();
    let dec = decode_multi(&c, &r.bits).unwrap();
    assert!(dec.is_feasible() && dec.collisions.is_empty());
    assert!((r.value - 4.0).abs() <= TOL);
    assert!((r.value - dec.total_weight()).abs() <= TOL, "collision term is nonzero at the optimum");
    assert_ne!(dec.vehicles[0].1.vertices[1], dec.vehicles[1].1.vertices[1]);
    // Both through b meet head-on.
    let head_on = c
        .encode_routes(&[
            vec!["a".into(), "b".into(), "c".into()],
            vec!["c".into(), "b".into(), "a".into()],
        ])
        .unwrap();
    assert!(c.polynomial.evaluate(&head_on).unwrap() >= r.value + c.penalty.value() - TOL);
}

fn subdivision_isometry() {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=8);
        let g = generate(GraphFamily::Connected, n, None, 500 + seed, GenOptions::default());
        let steps: BTreeMap<String, usize> =
            (0..g.num_arcs()).map(|a| (g.arc_label(a), rng.gen_range(1..=3))).collect();
        let h = subdivide_for_speed(&g, &steps).unwrap();
        let extra: usize = steps.values().map(|m| m - 1).sum();
        assert_eq!(h.num_vertices(), g.num_vertices() + extra);
        let dg = floyd_warshall(&g);
        let dh = floyd_warshall(&h);
        for u in 0..n {
            for v in 0..n {
                let (hu, hv) = (
                    h.vertex_index(g.vertex_name(u)).unwrap(),
                    h.vertex_index(g.vertex_name(v)).unwrap(),
                );
                assert!((dg[u][v] - dh[hu][hv]).abs() <= TOL, "{u}->{v}");
            }
        }
    }
}

/// Straightforward dense simulation used to check the fast one.
fn reference_state(p: &Qubo, betas: &[f64], gammas: &[f64]) -> Vec<Complex<f64>> {
    let n = p.num_vars();
    let dim = 1usize << n;
    let mut psi = vec![Complex::new((dim as f64).powf(-0.5), 0.0); dim];
    for (&b, &g) in betas.iter().zip(gammas) {
        for (s, a) in psi.iter_mut().enumerate() {
            let e = p.evaluate(&state_to_bits(s as u64, n)).unwrap();
            *a *= Complex::new((g * e).cos(), -(g * e).sin());
        }
        for q in 0..n {
            let mut next = psi.clone();
            for s in 0..dim {
                let t = s ^ (1 << q);
                next[s] = psi[s] * b.cos() + psi[t] * Complex::new(0.0, -b.sin());
            }
            psi = next;
        }
    }
    psi
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Qubo {
    let mut p = QuboPolynomial::with_vars(n);
    p.add_constant(rng.gen_range(-1.0..1.0));
    for i in 0..n {
        p.add_linear(i, rng.gen_range(-2.0..2.0));
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                p.add_quadratic(i, j, rng.gen_range(-2.0..2.0));
            }
        }
    }
    p
}

fn statevector_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=12 {
        let p = random_poly(&mut rng, n);
        let sim = QaoaSimulator::new(&p).unwrap();
        let layers = 3;
        let betas: Vec<f64> = (0..layers).map(|_| rng.gen_range(0.0..3.2)).collect();
        let gammas: Vec<f64> = (0..layers).map(|_| rng.gen_range(0.0..3.2)).collect();
        let mut psi = sim.uniform();
        for l in 0..layers {
            sim.layer(&mut psi, betas[l], gammas[l]);
            assert!((sim.norm_squared(&psi) - 1.0).abs() <= TOL);
        }
        let mut direct = 0.0;
        for (s, a) in psi.iter().enumerate() {
            direct += a.norm_sqr() * p.evaluate(&state_to_bits(s as u64, n)).unwrap();
        }
        assert!((sim.expectation(&psi) - direct).abs() <= TOL, "n = {n}");
        if n <= 8 {
            let reference = reference_state(&p, &betas, &gammas);
            for (a, b) in psi.iter().zip(&reference) {
                assert!((a - b).norm() <= TOL);
            }
        }
    }

    // One qubit, C = h·x: P(1) = (1 + sin 2β · sin γh) / 2.
    for &(h, beta, gamma) in &[(1.0f64, 0.3f64, 0.7f64), (-2.5, 1.1, 0.4), (0.75, 2.9, 2.2)] {
        let mut p = QuboPolynomial::with_vars(1);
        p.add_linear(0, h);
        let sim = QaoaSimulator::new(&p).unwrap();
        let psi = sim.evolve(&[beta], &[gamma]);
        let p1 = 0.5 * (1.0 + (2.0 * beta).sin() * (gamma * h).sin());
        assert!((psi[1].norm_sqr() - p1).abs() <= TOL);
        assert!((sim.expectation(&psi) - h * p1).abs() <= TOL);
    }

    // A ten-arc routing instance at depth two.
    let g: Digraph = WeightedDigraph::from_parts(
        &["o", "a", "b", "c", "d"],
        &[
            ("o", "a", 1.0),
            ("o", "b", 2.0),
            ("a", "b", 1.0),
            ("b", "a", 1.0),
            ("a", "c", 2.0),
            ("b", "c", 1.0),
            ("c", "a", 3.0),
            ("a", "d", 4.0),
            ("c", "d", 1.0),
            ("b", "d", 3.0),
        ],
    )
    .unwrap();
    let c = compile_single(&g, &RouteQuery::new("o", "d"), Penalty::default_for(&g), SingleOptions::default()).unwrap();
    assert_eq!(c.polynomial.num_vars(), 10);
    let cfg = SolveConfig {
        qaoa: QaoaConfig {
            depth: 2,
            ..QaoaConfig::default()
        },
        ..SolveConfig::new(Backend::Qaoa)
    };
    let r = solve_qaoa(&c.polynomial, &cfg).unwrap();
    let q = r.qaoa.unwrap();
    let baseline = 2f64.powi(-10);
    println!(
        "  ten-variable instance at depth 2: ground probability {:.4e} vs uniform {baseline:.4e}",
        q.ground_probability
    );
    assert!(q.ground_probability > baseline);
}

fn flow_balance_regression() {
    let g: Digraph = WeightedDigraph::from_parts(
        &["o", "b", "a", "d"],
        &[("o", "b", 1.0), ("b", "d", 1.0), ("a", "d", 0.5)],
    )
    .unwrap();
    let q = RouteQuery::new("o", "d");
    let literal = compile_single(
        &g,
        &q,
        Penalty::default_for(&g),
        SingleOptions {
            literal_flow_balance: true,
        },
    )
    .unwrap();
    let r = solve_exact(&literal.polynomial).unwrap();
    assert!(!decode_single(&literal, &r.bits).unwrap().is_feasible());

    let squared = compile_single(&g, &q, Penalty::default_for(&g), SingleOptions::default()).unwrap();
    let r = solve_exact(&squared.polynomial).unwrap();
    let dec = decode_single(&squared, &r.bits).unwrap();
    assert!(dec.is_feasible());
    assert_eq!(dec.vertices, ["o", "b", "d"]);
    assert!((r.value - 2.0).abs() <= TOL);
}

fn reproducibility() {
    let sample = quborouter::graph::GraphDocument::from_graph(&sample_graph());
    let problems = [
        ProblemSource::Single {
            graph: sample.clone(),
            origin: "o".into(),
            dest: "d".into(),
            literal_flow_balance: false,
        },
        ProblemSource::Tsp {
            graph: quborouter::graph::GraphDocument::from_graph(&generate(
                GraphFamily::Complete,
                4,
                None,
                2,
                GenOptions::default(),
            )),
            start: "v0".into(),
            prune: false,
        },
    ];
    for source in problems {
        let (problem, _) = ProblemFile::build(source, None).unwrap();
        for backend in [Backend::Exact, Backend::Anneal, Backend::Qaoa] {
            for seed in [0, 17] {
                let mut cfg = SolveConfig::new(backend).with_seed(seed);
                cfg.anneal.sweeps = 200;
                cfg.anneal.restarts = 8;
                cfg.qaoa.grid = 12;
                cfg.qaoa.descent_iters = 10;
                let a = to_json_text(&solve_problem(&problem, &cfg).unwrap().without_wall_time());
                let b = to_json_text(&solve_problem(&problem, &cfg).unwrap().without_wall_time());
                assert_eq!(a, b, "{backend} seed {seed}");
            }
        }
    }

    // Separate processes with different thread caps.
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_quborouter");
    let graph = dir.path().join("g.json");
    std::fs::write(&graph, quborouter::graph::emit_graph(&sample_graph())).unwrap();
    let problem = dir.path().join("p.json");
    let run = |args: &[&str], threads: &str| {
        let out = Command::new(bin)
            .args(args)
            .env("QUBOROUTER_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    run(
        &[
            "compile", "single", "--graph", graph.to_str().unwrap(), "--origin", "o", "--dest", "d", "--out",
            problem.to_str().unwrap(),
        ],
        "1",
    );
    for backend in ["exact", "anneal", "qaoa"] {
        let mut reports = Vec::new();
        for threads in ["1", "4"] {
            let text = run(
                &[
                    "solve", "--problem", problem.to_str().unwrap(), "--backend", backend, "--seed", "5", "--grid", "8",
                    "--descent-iters", "5", "--shots", "64", "--sweeps", "100", "--restarts", "4",
                ],
                threads,
            );
            let mut v: serde_json::Value = serde_json::from_slice(&text).unwrap();
            v["wall_time"] = serde_json::Value::from(0.0);
            reports.push(serde_json::to_string(&v).unwrap());
        }
        assert_eq!(reports[0], reports[1], "{backend} differs across processes");
    }
}
