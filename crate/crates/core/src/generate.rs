//! Deterministic instance generators: grid graphs, random planar
//! triangulations (incremental face splits) and a vision-style grid
//! with block terminals. All randomness flows from one seeded ChaCha
//! generator.

use crate::instance::FlowProblem;
use crate::planar::{Capacities, Dart, NodeId, PlanarGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `rows` x `cols` grid with its natural embedding. Arcs run rightwards
/// then downwards, both row-major. Returns the graph and its arc list.
pub fn grid_graph(rows: usize, cols: usize) -> (PlanarGraph, Vec<(NodeId, NodeId)>) {
    assert!(rows >= 1 && cols >= 1 && rows * cols >= 2);
    let id = |r: usize, c: usize| r * cols + c;
    let h_arc = |r: usize, c: usize| r * (cols - 1) + c; // (r,c) -> (r,c+1)
    let h_count = rows * (cols.saturating_sub(1));
    let v_arc = |r: usize, c: usize| h_count + r * cols + c; // (r,c) -> (r+1,c)
    let mut arcs = Vec::new();
    for r in 0..rows {
        for c in 0..cols - 1 {
            arcs.push((id(r, c), id(r, c + 1)));
        }
    }
    for r in 0..rows - 1 {
        for c in 0..cols {
            arcs.push((id(r, c), id(r + 1, c)));
        }
    }
    let mut rotations = vec![Vec::new(); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let rot = &mut rotations[id(r, c)];
            // counterclockwise: right, up, left, down
            if c + 1 < cols {
                rot.push(Dart::forward(h_arc(r, c)));
            }
            if r > 0 {
                rot.push(Dart::backward(v_arc(r - 1, c)));
            }
            if c > 0 {
                rot.push(Dart::backward(h_arc(r, c - 1)));
            }
            if r + 1 < rows {
                rot.push(Dart::forward(v_arc(r, c)));
            }
        }
    }
    let g = PlanarGraph::build_embedding(rows * cols, &arcs, &rotations)
        .expect("grid embedding is planar");
    (g, arcs)
}

/// Random planar triangulation grown by repeatedly splitting a face with
/// a new node joined to its three corners.
pub fn random_triangulation(n: usize, rng: &mut ChaCha8Rng) -> PlanarGraph {
    assert!(n >= 3);
    // grow in an adjacency description first, then build
    #[derive(Clone)]
    struct Rot {
        darts: Vec<Dart>,
    }
    let mut arcs: Vec<(NodeId, NodeId)> = vec![(0, 1), (1, 2), (2, 0)];
    let mut rotations: Vec<Rot> = vec![
        Rot { darts: vec![Dart(0), Dart(5)] },
        Rot { darts: vec![Dart(2), Dart(1)] },
        Rot { darts: vec![Dart(4), Dart(3)] },
    ];
    // faces tracked as triangles of darts (d1,d2,d3) with head(d1)=tail(d2), ...
    let mut faces: Vec<[Dart; 3]> = vec![[Dart(0), Dart(2), Dart(4)], [Dart(1), Dart(5), Dart(3)]];
    let tail = |arcs: &Vec<(NodeId, NodeId)>, d: Dart| -> NodeId {
        let (t, h) = arcs[d.arc()];
        if d.is_forward() { t } else { h }
    };
    for v in 3..n {
        let fi = rng.gen_range(0..faces.len());
        let [d1, d2, d3] = faces[fi];
        let (a, b, c) = (tail(&arcs, d1), tail(&arcs, d2), tail(&arcs, d3));
        // new arcs v->a, v->b, v->c
        let base = arcs.len();
        arcs.push((v, a));
        arcs.push((v, b));
        arcs.push((v, c));
        // around the new node the spokes run opposite to the face walk
        rotations.push(Rot {
            darts: vec![Dart::forward(base), Dart::forward(base + 2), Dart::forward(base + 1)],
        });
        // splice the spoke's reverse before the face dart at each corner
        let splice = |rot: &mut Rot, before: Dart, d: Dart| {
            let pos = rot.darts.iter().position(|&x| x == before).unwrap();
            rot.darts.insert(pos, d);
        };
        splice(&mut rotations[a], d1, Dart::backward(base));
        splice(&mut rotations[b], d2, Dart::backward(base + 1));
        splice(&mut rotations[c], d3, Dart::backward(base + 2));
        faces[fi] = [d1, Dart::backward(base + 1), Dart::forward(base)];
        faces.push([d2, Dart::backward(base + 2), Dart::forward(base + 1)]);
        faces.push([d3, Dart::backward(base), Dart::forward(base + 2)]);
    }
    let rot_lists: Vec<Vec<Dart>> = rotations.into_iter().map(|r| r.darts).collect();
    PlanarGraph::build_embedding(n, &arcs, &rot_lists).expect("triangulation is planar")
}

fn random_caps(g: &PlanarGraph, rng: &mut ChaCha8Rng, cap_range: (i64, i64)) -> Capacities {
    let (lo, hi) = cap_range;
    let mut c = Capacities::new(g.dart_capacity(), 0);
    for a in 0..g.arc_capacity() {
        c.set(Dart::forward(a), rng.gen_range(lo..=hi));
        c.set(Dart::backward(a), rng.gen_range(lo..=hi));
    }
    c
}

fn sample_disjoint_terminals(
    n: usize,
    s_count: usize,
    t_count: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<NodeId>, Vec<NodeId>) {
    let mut ids: Vec<NodeId> = (0..n).collect();
    ids.shuffle(rng);
    let s = ids[..s_count].to_vec();
    let t = ids[s_count..s_count + t_count].to_vec();
    (s, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Grid,
    RandomTriangulation,
    VisionGrid,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "grid" => Some(Kind::Grid),
            "random-triangulation" => Some(Kind::RandomTriangulation),
            "vision-grid" => Some(Kind::VisionGrid),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Grid => "grid",
            Kind::RandomTriangulation => "random-triangulation",
            Kind::VisionGrid => "vision-grid",
        }
    }
}

/// Deterministic instance generator. `n` is a target node count; grids
/// use the nearest square. Terminal counts default to about sqrt(n),
/// capped at n/10 for larger instances.
pub fn generate(kind: Kind, n: usize, seed: u64, cap_range: (i64, i64)) -> FlowProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        Kind::Grid => {
            let side = ((n as f64).sqrt().round() as usize).max(2);
            let (g, _) = grid_graph(side, side);
            let c = random_caps(&g, &mut rng, cap_range);
            let nn = g.live_node_count();
            let terminals = ((nn as f64).sqrt() as usize).clamp(1, (nn / 10).max(1));
            let (s, t) = sample_disjoint_terminals(nn, terminals, terminals, &mut rng);
            FlowProblem::new(g, c, s, t)
        }
        Kind::RandomTriangulation => {
            let g = random_triangulation(n.max(4), &mut rng);
            let c = random_caps(&g, &mut rng, cap_range);
            let nn = g.live_node_count();
            let terminals = ((nn as f64).sqrt() as usize).clamp(1, (nn / 10).max(1));
            let (s, t) = sample_disjoint_terminals(nn, terminals, terminals, &mut rng);
            FlowProblem::new(g, c, s, t)
        }
        Kind::VisionGrid => {
            // pixel grid; seed block in one corner, background block in the
            // opposite corner, smoothing capacities elsewhere
            let side = ((n as f64).sqrt().round() as usize).max(4);
            let (g, _) = grid_graph(side, side);
            let mut c = random_caps(&g, &mut rng, cap_range);
            // strengthen a random band to mimic an object boundary
            for a in 0..g.arc_capacity() {
                if rng.gen_bool(0.15) {
                    c.set(Dart::forward(a), cap_range.1 * 2);
                }
            }
            let block = (side / 4).max(1);
            let mut s = Vec::new();
            let mut t = Vec::new();
            for r in 0..block {
                for cc in 0..block {
                    s.push(r * side + cc);
                    t.push((side - 1 - r) * side + (side - 1 - cc));
                }
            }
            FlowProblem::new(g, c, s, t)
        }
    }
}

/// Random planar bipartite instance for the matching application: a
/// random subgraph of a grid (grids are bipartite by parity).
pub fn random_planar_bipartite(
    n: usize,
    seed: u64,
) -> (PlanarGraph, Vec<NodeId>, Vec<NodeId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = ((n as f64).sqrt().round() as usize).max(2);
    let (full, arcs) = grid_graph(side, side);
    // keep a random subset of edges, orient all left-to-right (even parity -> odd)
    let mut kept_arcs = Vec::new();
    for (a, &(u, v)) in arcs.iter().enumerate() {
        let _ = a;
        if rng.gen_bool(0.75) {
            let (r1, c1) = (u / side, u % side);
            if (r1 + c1) % 2 == 0 {
                kept_arcs.push((u, v));
            } else {
                kept_arcs.push((v, u));
            }
        }
    }
    // rebuild rotations from the full grid's rotation order
    let mut rotations = vec![Vec::new(); side * side];
    let mut arc_of = std::collections::HashMap::new();
    for (i, &(u, v)) in kept_arcs.iter().enumerate() {
        arc_of.insert((u.min(v), u.max(v)), i);
    }
    for v in full.nodes() {
        for d in full.darts_at(v) {
            let w = full.head(d);
            if let Some(&i) = arc_of.get(&(v.min(w), v.max(w))) {
                let (t, _) = kept_arcs[i];
                rotations[v].push(if t == v { Dart::forward(i) } else { Dart::backward(i) });
            }
        }
    }
    let g = PlanarGraph::build_embedding(side * side, &kept_arcs, &rotations).unwrap();
    let left = (0..side * side).filter(|v| (v / side + v % side) % 2 == 0).collect();
    let right = (0..side * side).filter(|v| (v / side + v % side) % 2 == 1).collect();
    (g, left, right)
}
