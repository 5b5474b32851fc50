//! Property tests for the structural and flow-algebra invariants.

use pmf_core::flow::{reaches, residual_reachable, Pseudoflow};
use pmf_core::generate::{generate, grid_graph, random_triangulation, Kind};
use pmf_core::hassin::{circulation_from_potentials, dual_dijkstra, FacePotential};
use pmf_core::instance::FlowProblem;
use pmf_core::oracle::maxflow_on_residual;
use pmf_core::planar::surgery::{contract_path, triangulate_and_biconnect, SurgeryLog};
use pmf_core::planar::{Capacities, Dart, NodeId, PlanarGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(seed: u64) -> (PlanarGraph, Capacities, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = if seed % 2 == 0 {
        grid_graph(rng.gen_range(3..6), rng.gen_range(3..6)).0
    } else {
        random_triangulation(rng.gen_range(6..20), &mut rng)
    };
    let mut c = Capacities::new(g.dart_capacity(), 0);
    for a in 0..g.arc_capacity() {
        c.set(Dart::forward(a), rng.gen_range(0..10));
        c.set(Dart::backward(a), rng.gen_range(0..10));
    }
    (g, c, rng)
}

fn random_feasible_flow(
    g: &PlanarGraph,
    c: &Capacities,
    rng: &mut ChaCha8Rng,
) -> Pseudoflow {
    // a few random-terminal oracle flows keep feasibility and typically
    // leave interesting residual structure
    let n = g.live_node_count();
    let mut f = Pseudoflow::zero(g);
    for _ in 0..rng.gen_range(0..3) {
        let s = vec![rng.gen_range(0..n)];
        let t = vec![rng.gen_range(0..n)];
        if s == t {
            continue;
        }
        let (_, delta) = maxflow_on_residual(g, c, &f, None, &s, &t);
        f = f.add(g, &delta);
    }
    f
}

fn node_sample(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..n).collect();
    for i in (1..ids.len()).rev() {
        let j = rng.gen_range(0..=i);
        ids.swap(i, j);
    }
    ids.truncate(count);
    ids
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Pushing a flow with source set X cannot open an A-to-B residual
    /// path when A and X together could not reach B before.
    #[test]
    fn sources_lemma(seed in 0u64..100_000) {
        let (g, c, mut rng) = random_instance(seed);
        let f1 = random_feasible_flow(&g, &c, &mut rng);
        let n = g.live_node_count();
        let x = node_sample(n, rng.gen_range(1..3), &mut rng);
        let a = node_sample(n, rng.gen_range(1..3), &mut rng);
        let mut ax = a.clone();
        ax.extend_from_slice(&x);
        let seen = residual_reachable(&g, &c, &f1, &ax);
        let b: Vec<NodeId> = g.nodes().filter(|&v| !seen[v]).collect();
        prop_assume!(!b.is_empty());
        // a flow with source set X pushed on the current residual state
        let (_, f) = maxflow_on_residual(&g, &c, &f1, None, &x, &b);
        let after = f1.add(&g, &f);
        prop_assert!(!reaches(&g, &c, &after, &a, &b));
    }

    /// The sinks-lemma mirror: a flow with sink set X cannot open a
    /// path from A to B when A could reach neither B nor X before.
    #[test]
    fn sinks_lemma(seed in 0u64..100_000) {
        let (g, c, mut rng) = random_instance(seed);
        let f1 = random_feasible_flow(&g, &c, &mut rng);
        let n = g.live_node_count();
        let a = node_sample(n, rng.gen_range(1..3), &mut rng);
        let seen = residual_reachable(&g, &c, &f1, &a);
        let unreached: Vec<NodeId> = g.nodes().filter(|&v| !seen[v]).collect();
        prop_assume!(unreached.len() >= 2);
        let x = vec![unreached[0]];
        let b: Vec<NodeId> = unreached[1..].to_vec();
        let sources = node_sample(n, 2, &mut rng);
        let (_, f) = maxflow_on_residual(&g, &c, &f1, None, &sources, &x);
        let after = f1.add(&g, &f);
        prop_assert!(!reaches(&g, &c, &after, &a, &b));
    }

    /// Pushing a feasible circulation never changes reachability.
    #[test]
    fn circulation_preserves_unreachability(seed in 0u64..100_000) {
        let (g, c, mut rng) = random_instance(seed);
        let f1 = random_feasible_flow(&g, &c, &mut rng);
        // residual dual distances induce a feasible circulation
        let root = rng.gen_range(0..g.face_count());
        let phi = dual_dijkstra(&g, |d| c.get(d) - f1.get(d), root);
        let rho = circulation_from_potentials(&g, &FacePotential { phi });
        for v in g.nodes() {
            prop_assert_eq!(rho.inflow(v), 0);
        }
        let after = f1.add(&g, &rho);
        prop_assert!(after.is_feasible(&g, &c));
        let u = rng.gen_range(0..g.live_node_count());
        let before_seen = residual_reachable(&g, &c, &f1, &[u]);
        let after_seen = residual_reachable(&g, &c, &after, &[u]);
        for v in g.nodes() {
            if !before_seen[v] {
                prop_assert!(!after_seen[v], "node {} became reachable", v);
            }
        }
    }

    /// Inflows always sum to zero and caches stay exact.
    #[test]
    fn inflow_telescopes(seed in 0u64..100_000) {
        let (g, c, mut rng) = random_instance(seed);
        let f = random_feasible_flow(&g, &c, &mut rng);
        let total: i64 = g.nodes().map(|v| f.inflow(v)).sum();
        prop_assert_eq!(total, 0);
        f.check_consistency(&g).unwrap();
    }

    /// Triangulation plus a contraction, undone, restores the graph
    /// bit for bit; the intermediate states satisfy Euler's formula.
    #[test]
    fn surgery_roundtrip(seed in 0u64..100_000) {
        let (g0, c0, mut rng) = random_instance(seed);
        let mut g = g0.clone();
        let mut c = c0.clone();
        let fp = g.fingerprint();
        let mut log = SurgeryLog::new();
        triangulate_and_biconnect(&mut g, &mut log, &mut c).unwrap();
        g.validate().unwrap();
        let euler = g.live_node_count() as i64 - g.live_edge_count() as i64
            + g.face_count() as i64;
        prop_assert_eq!(euler, 2);
        // contract a short random path
        let mut path = Vec::new();
        let mut cur = rng.gen_range(0..g0.live_node_count());
        let mut used = vec![false; g.node_capacity()];
        used[cur] = true;
        for _ in 0..rng.gen_range(1..4) {
            let opts: Vec<Dart> = g.darts_at(cur).filter(|&d| !used[g.head(d)]).collect();
            if opts.is_empty() { break; }
            let d = opts[rng.gen_range(0..opts.len())];
            used[g.head(d)] = true;
            path.push(d);
            cur = g.head(d);
        }
        if !path.is_empty() {
            contract_path(&mut g, &mut log, &path).unwrap();
            g.validate().unwrap();
            let euler = g.live_node_count() as i64 - g.live_edge_count() as i64
                + g.face_count() as i64;
            prop_assert_eq!(euler, 2);
        }
        log.undo_all(&mut g, &mut c);
        prop_assert_eq!(g.fingerprint(), fp);
        prop_assert_eq!(&c, &c0);
    }

    /// The text format round-trips byte-identically.
    #[test]
    fn format_roundtrip(seed in 0u64..100_000, kind in 0usize..3) {
        let kind = [Kind::Grid, Kind::RandomTriangulation, Kind::VisionGrid][kind];
        let p = generate(kind, 40 + (seed % 60) as usize, seed, (0, 100));
        let text = p.write_text();
        let q = FlowProblem::parse_text(&text).unwrap();
        prop_assert_eq!(text, q.write_text());
    }
}
