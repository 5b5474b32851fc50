//! Maximum st-flow in st-planar graphs by shortest paths in the dual,
//! with the limited variant and the existing-arc variant whose output is
//! an explicit flow on one arc plus a face-potential circulation.

use crate::flow::Pseudoflow;
use crate::planar::surgery::{insert_arc_in_face, SurgeryLog};
use crate::planar::{Capacities, Dart, FaceId, NodeId, PlanarGraph};
use crate::{Error, Result};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub const INF: i64 = i64::MAX / 4;

/// Dual-node potentials. Differences across darts induce a circulation:
/// `rho(d) = phi(face_of(d)) - phi(face_of(rev d))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacePotential {
    pub phi: Vec<i64>,
}

impl FacePotential {
    pub fn zero(face_count: usize) -> Self {
        FacePotential { phi: vec![0; face_count] }
    }

    #[inline]
    pub fn get(&self, f: FaceId) -> i64 {
        self.phi[f]
    }
}

/// The circulation induced by a face potential; conserves at every node.
pub fn circulation_from_potentials(g: &PlanarGraph, phi: &FacePotential) -> Pseudoflow {
    let mut f = Pseudoflow::zero(g);
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) {
            continue;
        }
        let rho = phi.get(g.face_of(d)) - phi.get(g.face_of(d.rev()));
        if rho != 0 {
            f.push(g, d, rho);
        }
    }
    f
}

/// Single-source shortest paths over the dual: every dart is an arc from
/// the face on its right to the face on its left, with the given length.
/// Lengths must be nonnegative. Unreached faces get `INF`.
pub fn dual_dijkstra(
    g: &PlanarGraph,
    length: impl Fn(Dart) -> i64,
    source: FaceId,
) -> Vec<i64> {
    let fcount = g.face_count();
    // CSR over faces
    let mut deg = vec![0usize; fcount];
    for d in g.darts() {
        deg[g.face_of(d.rev())] += 1;
    }
    let mut off = vec![0usize; fcount + 1];
    for f in 0..fcount {
        off[f + 1] = off[f] + deg[f];
    }
    let mut to = vec![0usize; off[fcount]];
    let mut w = vec![0i64; off[fcount]];
    let mut pos = off.clone();
    for d in g.darts() {
        let t = g.face_of(d.rev());
        let l = length(d);
        debug_assert!(l >= 0, "negative dual length on {:?}", d);
        to[pos[t]] = g.face_of(d);
        w[pos[t]] = l;
        pos[t] += 1;
    }
    let mut dist = vec![INF; fcount];
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0, source)));
    while let Some(Reverse((du, u))) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for i in off[u]..off[u + 1] {
            let v = to[i];
            let nd = du + w[i];
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone)]
pub struct StFlow {
    pub flow: Pseudoflow,
    pub value: i64,
    /// Shortest-path potentials of the residual dual on the original
    /// graph's faces; the induced circulation is feasible in the
    /// residual graph.
    pub potential: FacePotential,
}

fn common_face(g: &PlanarGraph, s: NodeId, t: NodeId) -> Result<FaceId> {
    let fs = g.faces_at(s);
    let ft = g.faces_at(t);
    let set: std::collections::HashSet<FaceId> = ft.into_iter().collect();
    fs.into_iter()
        .filter(|f| set.contains(f))
        .min()
        .ok_or_else(|| Error::NotCofacial(format!("nodes {s} and {t}")))
}

/// Maximum feasible s-t flow of value at most `limit`, for `s`, `t` on a
/// common face. An artificial arc from `t` to `s` with capacity `limit`
/// is embedded in that face; dual distances from the face left of its
/// s-to-t dart give the flow.
pub fn limited_st_planar_maxflow(
    g: &PlanarGraph,
    c: &Capacities,
    s: NodeId,
    t: NodeId,
    limit: i64,
) -> Result<StFlow> {
    if s == t {
        return Err(Error::Input("source equals sink".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected("st-planar max flow".into()));
    }
    let f_common = common_face(g, s, t)?;
    let e_t = g
        .darts_at(t)
        .find(|&d| g.face_of(d) == f_common)
        .ok_or_else(|| Error::NotCofacial(format!("{t} not on face {f_common}")))?;
    let e_s = g
        .darts_at(s)
        .find(|&d| g.face_of(d) == f_common)
        .ok_or_else(|| Error::NotCofacial(format!("{s} not on face {f_common}")))?;
    let mut gs = g.clone();
    let mut cs = c.clone();
    let mut log = SurgeryLog::new();
    let art = insert_arc_in_face(&mut gs, &mut log, &mut cs, e_t, e_s, limit, 0)?;
    let d_art = Dart::backward(art); // s -> t dart of the artificial arc
    let t_star = gs.face_of(d_art);
    let phi = dual_dijkstra(&gs, |d| cs.get(d), t_star);
    debug_assert!(phi.iter().all(|&x| x < INF));
    let mut flow = Pseudoflow::zero(g);
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) {
            continue;
        }
        let rho = phi[gs.face_of(d)] - phi[gs.face_of(d.rev())];
        if rho != 0 {
            flow.push(g, d, rho);
        }
    }
    let d_fwd = Dart::forward(art); // t -> s
    let value = phi[gs.face_of(d_fwd)] - phi[gs.face_of(d_fwd.rev())];
    debug_assert!(flow.is_feasible(g, c));
    debug_assert_eq!(flow.inflow(t), value);
    // residual potential on the original faces, for the implicit form
    let pot = dual_dijkstra(g, |d| c.get(d) - flow.get(d), f_common);
    Ok(StFlow { flow, value, potential: FacePotential { phi: pot } })
}

/// Maximum s-t flow for co-facial `s`, `t`.
pub fn st_planar_maxflow(
    g: &PlanarGraph,
    c: &Capacities,
    s: NodeId,
    t: NodeId,
) -> Result<StFlow> {
    let big = crate::flow::capacity_sum(g, c) + 1;
    limited_st_planar_maxflow(g, c, s, t, big)
}

#[derive(Debug, Clone)]
pub struct ExistingArcFlow {
    /// Explicit flow on the arc's s-to-t dart (its reverse carries the
    /// negation); zero everywhere else.
    pub flow_on_dart: i64,
    pub dart: Dart,
    pub potential: FacePotential,
    /// Value of the induced s-t flow (circulation + explicit part).
    pub value: i64,
}

impl ExistingArcFlow {
    /// Materializes the total flow `circulation(potential) + explicit`.
    pub fn total(&self, g: &PlanarGraph) -> Pseudoflow {
        let mut f = circulation_from_potentials(g, &self.potential);
        f.push(g, self.dart, self.flow_on_dart);
        f
    }
}

/// Hassin's trick with an existing arc `a` from `t` to `s` playing the
/// artificial role: saturate its s-to-t dart, take dual distances from
/// the face left of that dart (the reverse dart's length is the
/// remaining limit), and keep the circulation implicit. Returns the
/// explicit flow on the arc and the face potential; their sum is a
/// maximum feasible s-t flow with value at most `limit`.
pub fn limited_flow_on_existing_arc(
    g: &PlanarGraph,
    c: &Capacities,
    arc: usize,
    limit: i64,
) -> Result<ExistingArcFlow> {
    if !g.is_connected() {
        return Err(Error::Disconnected("existing-arc flow".into()));
    }
    let d = Dart::backward(arc); // s -> t dart (head is t = tail of the arc)
    if !g.dart_is_alive(d) {
        return Err(Error::Malformed(format!("arc {arc} is dead")));
    }
    let val0 = c.get(d).min(limit).max(0);
    let remaining = (limit - val0).max(0);
    let t_star = g.face_of(d);
    let phi = dual_dijkstra(
        g,
        |e| {
            if e == d.rev() {
                remaining
            } else if e == d {
                c.get(d) - val0
            } else {
                c.get(e)
            }
        },
        t_star,
    );
    let val = phi[g.face_of(d.rev())] - phi[g.face_of(d)];
    Ok(ExistingArcFlow {
        flow_on_dart: val0 + val,
        dart: d,
        potential: FacePotential { phi },
        value: val0 + val,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::grid_graph;
    use crate::oracle::oracle_maxflow;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_potential_zero_flow() {
        let (g, _) = grid_graph(3, 3);
        let phi = FacePotential::zero(g.face_count());
        let f = circulation_from_potentials(&g, &phi);
        assert!(g.darts().all(|d| f.get(d) == 0));
    }

    #[test]
    fn unit_potential_circulates_one_face() {
        let (g, _) = grid_graph(2, 2);
        // lift one internal face by one
        let internal = (0..g.face_count())
            .find(|&f| g.face_orbit(f).len() == 4)
            .unwrap();
        let mut phi = FacePotential::zero(g.face_count());
        phi.phi[internal] = 1;
        let f = circulation_from_potentials(&g, &phi);
        for v in g.nodes() {
            assert_eq!(f.inflow(v), 0);
        }
        let moved: i64 = g.darts().map(|d| f.get(d).abs()).sum();
        assert_eq!(moved, 8); // four arcs, counted on both darts
    }

    #[test]
    fn random_potential_conserves() {
        let (g, _) = grid_graph(4, 5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut phi = FacePotential::zero(g.face_count());
        for x in phi.phi.iter_mut() {
            *x = rng.gen_range(-10..10);
        }
        let f = circulation_from_potentials(&g, &phi);
        for v in g.nodes() {
            assert_eq!(f.inflow(v), 0);
        }
    }

    #[test]
    fn single_arc_maxflow() {
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 5);
        let r = st_planar_maxflow(&g, &c, 0, 1).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.flow.get(Dart(0)), 5);
    }

    #[test]
    fn three_arc_cofacial() {
        // s=0, a=1, t=2 on the outer face: s->a cap 2, a->t cap 1, s->t cap 3
        let arcs = vec![(0, 1), (1, 2), (0, 2)];
        let rotations = vec![
            vec![Dart(0), Dart(4)],
            vec![Dart(2), Dart(1)],
            vec![Dart(5), Dart(3)],
        ];
        let g = PlanarGraph::build_embedding(3, &arcs, &rotations).unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 2);
        c.set(Dart(2), 1);
        c.set(Dart(4), 3);
        let (oracle, _) = oracle_maxflow(&g, &c, &[0], &[2]);
        assert_eq!(oracle, 4);
        let r = st_planar_maxflow(&g, &c, 0, 2).unwrap();
        assert_eq!(r.value, 4);
        assert!(r.flow.is_feasible(&g, &c));
        assert_eq!(r.flow.inflow(1), 0);
    }

    #[test]
    fn grid_corners_match_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..25 {
            let (g, _) = grid_graph(4, 4);
            let mut c = Capacities::new(g.dart_capacity(), 0);
            for a in 0..g.arc_capacity() {
                c.set(Dart::forward(a), rng.gen_range(0..20));
                c.set(Dart::backward(a), rng.gen_range(0..20));
            }
            let (s, t) = (0, 15); // opposite corners, both on the outer face
            let (ov, _) = oracle_maxflow(&g, &c, &[s], &[t]);
            let r = st_planar_maxflow(&g, &c, s, t).unwrap();
            assert_eq!(r.value, ov);
            assert!(r.flow.is_feasible(&g, &c));
            for v in g.nodes() {
                if v != s && v != t {
                    assert_eq!(r.flow.inflow(v), 0);
                }
            }
            assert!(!crate::flow::reaches(&g, &c, &r.flow, &[s], &[t]));
            // the returned potential induces a circulation feasible in the residual
            let circ = circulation_from_potentials(&g, &r.potential);
            for d in g.darts() {
                assert!(circ.get(d) <= c.get(d) - r.flow.get(d));
            }
        }
    }

    #[test]
    fn limited_flow_caps_value() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..15 {
            let (g, _) = grid_graph(3, 4);
            let mut c = Capacities::new(g.dart_capacity(), 0);
            for a in 0..g.arc_capacity() {
                c.set(Dart::forward(a), rng.gen_range(0..9));
            }
            let (s, t) = (0, 11);
            let full = st_planar_maxflow(&g, &c, s, t).unwrap().value;
            for limit in [0, 1, 3, full, full + 5] {
                let r = limited_st_planar_maxflow(&g, &c, s, t, limit).unwrap();
                assert_eq!(r.value, full.min(limit));
                assert!(r.flow.is_feasible(&g, &c));
            }
        }
    }

    #[test]
    fn existing_arc_single() {
        // one arc t->s (arc 0 from 1 to 0), so its backward dart is s->t with cap 4
        let g = PlanarGraph::build_embedding(2, &[(1, 0)], &[vec![Dart(1)], vec![Dart(0)]])
            .unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(1), 4); // s -> t dart
        let big = 100;
        let r = limited_flow_on_existing_arc(&g, &c, 0, big).unwrap();
        assert_eq!(r.value, 4);
        assert_eq!(r.flow_on_dart, 4);
        let total = r.total(&g);
        assert_eq!(total.inflow(1), 4);
        assert!(total.is_feasible(&g, &c));
    }

    #[test]
    fn existing_arc_limit_zero() {
        let (g, _) = grid_graph(2, 3);
        let mut c = Capacities::new(g.dart_capacity(), 3);
        c.resize(g.dart_capacity());
        let r = limited_flow_on_existing_arc(&g, &c, 0, 0).unwrap();
        let total = r.total(&g);
        // no net flow across the endpoints of arc 0
        let t = g.head(Dart::forward(0));
        let s = g.tail(Dart::forward(0));
        assert_eq!(total.inflow(t), 0);
        assert_eq!(total.inflow(s), 0);
        assert!(total.is_feasible(&g, &c));
    }

    #[test]
    fn existing_arc_matches_artificial_value() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let (g, _) = grid_graph(3, 3);
            let mut c = Capacities::new(g.dart_capacity(), 0);
            for a in 0..g.arc_capacity() {
                c.set(Dart::forward(a), rng.gen_range(0..8));
                c.set(Dart::backward(a), rng.gen_range(0..8));
            }
            // use arc 0 (0 -> 1): treat as artificial from t=0 to s=1
            let d = Dart::backward(0);
            let (s, t) = (g.tail(d), g.head(d));
            let cap_d = c.get(d);
            let r = limited_flow_on_existing_arc(&g, &c, 0, 1_000).unwrap();
            let total = r.total(&g);
            assert!(total.is_feasible(&g, &c));
            for v in g.nodes() {
                if v != s && v != t {
                    assert_eq!(total.inflow(v), 0, "conservation off s,t");
                }
            }
            // same value as removing the arc and running the artificial version
            let mut c2 = c.clone();
            c2.set(d, 0);
            c2.set(d.rev(), 0);
            let alt = st_planar_maxflow(&g, &c2, s, t).unwrap().value;
            assert_eq!(r.value, alt + cap_d);
        }
    }
}
