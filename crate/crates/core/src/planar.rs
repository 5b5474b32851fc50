//! Combinatorial planar embeddings over darts.
//!
//! An arc is stored as a pair of oppositely directed darts at indices
//! `2a` and `2a+1`, so `rev` is index XOR 1. The embedding is a rotation
//! system: `next_around_tail` walks the darts leaving a node in
//! counterclockwise order. Faces are the orbits of `d -> next(rev(d))`
//! and `face_of(d)` is the face to the left of `d`. The dual shares dart
//! identities with the primal: `head*(d) = face_of(d)`.

use crate::{Error, Result};

pub type NodeId = usize;
pub type FaceId = usize;

const NIL: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub usize);

impl Dart {
    #[inline]
    pub fn rev(self) -> Dart {
        Dart(self.0 ^ 1)
    }
    /// Arc this dart belongs to.
    #[inline]
    pub fn arc(self) -> usize {
        self.0 >> 1
    }
    /// True for the dart oriented like its arc.
    #[inline]
    pub fn is_forward(self) -> bool {
        self.0 & 1 == 0
    }
    #[inline]
    pub fn forward(arc: usize) -> Dart {
        Dart(arc << 1)
    }
    #[inline]
    pub fn backward(arc: usize) -> Dart {
        Dart(arc << 1 | 1)
    }
}

impl std::fmt::Debug for Dart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Dense per-dart table. New arcs extend it with the fill value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DartMap<T: Copy> {
    data: Vec<T>,
    fill: T,
}

impl<T: Copy> DartMap<T> {
    pub fn new(dart_count: usize, fill: T) -> Self {
        DartMap { data: vec![fill; dart_count], fill }
    }

    #[inline]
    pub fn get(&self, d: Dart) -> T {
        if d.0 < self.data.len() { self.data[d.0] } else { self.fill }
    }

    #[inline]
    pub fn set(&mut self, d: Dart, value: T) {
        if d.0 >= self.data.len() {
            self.data.resize(d.0 + 1, self.fill);
        }
        self.data[d.0] = value;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn resize(&mut self, dart_count: usize) {
        self.data.resize(dart_count, self.fill);
    }

    pub fn fill_value(&self) -> T {
        self.fill
    }
}

/// Capacities per dart; `c(d)` and `c(rev d)` are independent.
pub type Capacities = DartMap<i64>;

#[derive(Debug, Clone)]
pub struct PlanarGraph {
    head: Vec<NodeId>,
    next: Vec<usize>,
    prev: Vec<usize>,
    first: Vec<usize>,
    dart_alive: Vec<bool>,
    node_alive: Vec<bool>,
    live_darts: usize,
    live_nodes: usize,
    face_of: Vec<FaceId>,
    face_dart: Vec<usize>,
    faces_valid: bool,
}

impl PlanarGraph {
    /// Builds an embedding from arcs and per-node counterclockwise
    /// rotations. Reports an error when a dart is repeated or missing, a
    /// rotation lists a dart with the wrong tail, or a connected
    /// component fails the Euler check (genus != 0).
    pub fn build_embedding(
        node_count: usize,
        arcs: &[(NodeId, NodeId)],
        rotations: &[Vec<Dart>],
    ) -> Result<PlanarGraph> {
        if rotations.len() != node_count {
            return Err(Error::Malformed(format!(
                "expected {} rotations, got {}",
                node_count,
                rotations.len()
            )));
        }
        let dart_count = arcs.len() * 2;
        let mut head = vec![NIL; dart_count];
        for (a, &(t, h)) in arcs.iter().enumerate() {
            if t >= node_count || h >= node_count {
                return Err(Error::Malformed(format!("arc {a} endpoint out of range")));
            }
            head[2 * a] = h;
            head[2 * a + 1] = t;
        }
        let mut next = vec![NIL; dart_count];
        let mut prev = vec![NIL; dart_count];
        let mut first = vec![NIL; node_count];
        let mut seen = vec![false; dart_count];
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() {
                continue;
            }
            for (i, &d) in rot.iter().enumerate() {
                if d.0 >= dart_count {
                    return Err(Error::Malformed(format!("dart {:?} out of range", d)));
                }
                if seen[d.0] {
                    return Err(Error::Malformed(format!("dart {:?} listed twice", d)));
                }
                seen[d.0] = true;
                if head[d.rev().0] != v {
                    return Err(Error::Malformed(format!(
                        "dart {:?} has tail {} but is listed at node {}",
                        d,
                        head[d.rev().0],
                        v
                    )));
                }
                let n = rot[(i + 1) % rot.len()];
                next[d.0] = n.0;
            }
            first[v] = rot[0].0;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Malformed(format!("dart d{missing} missing from rotations")));
        }
        for d in 0..dart_count {
            prev[next[d]] = d;
        }
        let mut g = PlanarGraph {
            head,
            next,
            prev,
            first,
            dart_alive: vec![true; dart_count],
            node_alive: vec![true; node_count],
            live_darts: dart_count,
            live_nodes: node_count,
            face_of: Vec::new(),
            face_dart: Vec::new(),
            faces_valid: false,
        };
        g.recompute_faces();
        g.check_genus()?;
        Ok(g)
    }

    /// Per-component Euler check: n - m + f must be 2 on each connected
    /// component of the embedding.
    fn check_genus(&self) -> Result<()> {
        let comps = self.components();
        let comp_count = comps.iter().filter(|&&c| c != NIL).max().map_or(0, |&c| c + 1);
        let mut n = vec![0i64; comp_count];
        let mut m = vec![0i64; comp_count];
        let mut f = vec![0i64; comp_count];
        for v in self.nodes() {
            n[comps[v]] += 1;
        }
        for d in self.darts() {
            if d.is_forward() {
                m[comps[self.tail(d)]] += 1;
            }
        }
        for face in 0..self.face_count() {
            f[comps[self.tail(Dart(self.face_dart[face]))]] += 1;
        }
        for c in 0..comp_count {
            if n[c] == 0 || m[c] == 0 {
                continue; // isolated nodes have no dart orbits
            }
            if n[c] - m[c] + f[c] != 2 {
                return Err(Error::NonPlanar(format!(
                    "component {}: n={} m={} f={} (Euler characteristic {})",
                    c,
                    n[c],
                    m[c],
                    f[c],
                    n[c] - m[c] + f[c]
                )));
            }
        }
        Ok(())
    }

    pub fn node_capacity(&self) -> usize {
        self.node_alive.len()
    }

    pub fn dart_capacity(&self) -> usize {
        self.dart_alive.len()
    }

    pub fn arc_capacity(&self) -> usize {
        self.dart_alive.len() / 2
    }

    pub fn live_node_count(&self) -> usize {
        self.live_nodes
    }

    pub fn live_dart_count(&self) -> usize {
        self.live_darts
    }

    pub fn live_edge_count(&self) -> usize {
        self.live_darts / 2
    }

    #[inline]
    pub fn node_is_alive(&self, v: NodeId) -> bool {
        self.node_alive[v]
    }

    #[inline]
    pub fn dart_is_alive(&self, d: Dart) -> bool {
        d.0 < self.dart_alive.len() && self.dart_alive[d.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_alive.len()).filter(move |&v| self.node_alive[v])
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.dart_alive.len()).filter(move |&d| self.dart_alive[d]).map(Dart)
    }

    #[inline]
    pub fn head(&self, d: Dart) -> NodeId {
        self.head[d.0]
    }

    #[inline]
    pub fn tail(&self, d: Dart) -> NodeId {
        self.head[d.0 ^ 1]
    }

    #[inline]
    pub fn next_around_tail(&self, d: Dart) -> Dart {
        Dart(self.next[d.0])
    }

    #[inline]
    pub fn prev_around_tail(&self, d: Dart) -> Dart {
        Dart(self.prev[d.0])
    }

    /// Successor along the face to the left of `d`.
    #[inline]
    pub fn face_next(&self, d: Dart) -> Dart {
        Dart(self.next[d.0 ^ 1])
    }

    pub fn first_dart(&self, v: NodeId) -> Option<Dart> {
        if self.first[v] == NIL { None } else { Some(Dart(self.first[v])) }
    }

    /// Darts leaving `v` in rotation order.
    pub fn darts_at(&self, v: NodeId) -> RotationIter<'_> {
        RotationIter { g: self, start: self.first[v], cur: self.first[v], done: self.first[v] == NIL }
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.darts_at(v).count()
    }

    #[inline]
    pub fn face_of(&self, d: Dart) -> FaceId {
        debug_assert!(self.faces_valid);
        self.face_of[d.0]
    }

    pub fn face_count(&self) -> usize {
        debug_assert!(self.faces_valid);
        self.face_dart.len()
    }

    pub fn faces_valid(&self) -> bool {
        self.faces_valid
    }

    pub fn face_representative(&self, f: FaceId) -> Dart {
        Dart(self.face_dart[f])
    }

    /// Darts of the face orbit, starting at the representative.
    pub fn face_orbit(&self, f: FaceId) -> Vec<Dart> {
        let start = Dart(self.face_dart[f]);
        let mut out = vec![start];
        let mut d = self.face_next(start);
        while d != start {
            out.push(d);
            d = self.face_next(d);
        }
        out
    }

    pub(crate) fn invalidate_faces(&mut self) {
        self.faces_valid = false;
    }

    /// Recomputes face orbits; ids are assigned by scanning darts in
    /// index order, so equal structures get equal ids.
    pub fn recompute_faces(&mut self) {
        self.face_of.clear();
        self.face_of.resize(self.dart_alive.len(), NIL);
        self.face_dart.clear();
        for d0 in 0..self.dart_alive.len() {
            if !self.dart_alive[d0] || self.face_of[d0] != NIL {
                continue;
            }
            let id = self.face_dart.len();
            self.face_dart.push(d0);
            let mut d = d0;
            loop {
                self.face_of[d] = id;
                d = self.next[d ^ 1];
                if d == d0 {
                    break;
                }
            }
        }
        self.faces_valid = true;
    }

    /// Component id per node (`usize::MAX` for dead nodes).
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![NIL; self.node_alive.len()];
        let mut id = 0;
        let mut stack = Vec::new();
        for v in 0..self.node_alive.len() {
            if !self.node_alive[v] || comp[v] != NIL {
                continue;
            }
            comp[v] = id;
            stack.push(v);
            while let Some(u) = stack.pop() {
                for d in self.darts_at(u) {
                    let w = self.head(d);
                    if comp[w] == NIL {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            id += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        let comps = self.components();
        let mut seen = 0;
        for v in self.nodes() {
            if comps[v] == 0 {
                seen += 1;
            } else {
                return false;
            }
        }
        seen == self.live_nodes
    }

    /// Dual graph over faces, sharing dart identities with the primal.
    /// `head*(d)` is the face to the left of `d`.
    pub fn dual(&self) -> Result<PlanarGraph> {
        if !self.is_connected() {
            return Err(Error::Disconnected("dual requires a connected graph".into()));
        }
        debug_assert!(self.faces_valid);
        let fcount = self.face_count();
        let dcap = self.dart_alive.len();
        let mut head = vec![NIL; dcap];
        let mut next = vec![NIL; dcap];
        let mut prev = vec![NIL; dcap];
        for d in self.darts() {
            head[d.0] = self.face_of[d.0];
            next[d.0] = d.rev().0 ^ 1; // placeholder, fixed below
        }
        for d in self.darts() {
            // rotation around the dual tail: reverse of the primal rotation step
            next[d.0] = self.next[d.0] ^ 1;
            prev[self.next[d.0] ^ 1] = d.0;
        }
        let mut first = vec![NIL; fcount];
        for f in 0..fcount {
            first[f] = self.face_dart[f] ^ 1;
        }
        let mut g = PlanarGraph {
            head,
            next,
            prev,
            first,
            dart_alive: self.dart_alive.clone(),
            node_alive: vec![true; fcount],
            live_darts: self.live_darts,
            live_nodes: fcount,
            face_of: Vec::new(),
            face_dart: Vec::new(),
            faces_valid: false,
        };
        g.recompute_faces();
        Ok(g)
    }

    /// Distinct faces incident to `v` (tails of its out-darts cover every corner).
    pub fn faces_at(&self, v: NodeId) -> Vec<FaceId> {
        let mut fs: Vec<FaceId> = self.darts_at(v).map(|d| self.face_of(d)).collect();
        fs.sort_unstable();
        fs.dedup();
        fs
    }

    /// Internal consistency check used by tests: rev pairing, rotation
    /// permutation cycles partition darts by tail, faces consistent.
    pub fn validate(&self) -> Result<()> {
        for d in self.darts() {
            if !self.dart_is_alive(d.rev()) {
                return Err(Error::Malformed(format!("{:?} alive but rev dead", d)));
            }
            let n = self.next_around_tail(d);
            if !self.dart_is_alive(n) || self.tail(n) != self.tail(d) {
                return Err(Error::Malformed(format!("rotation broken at {:?}", d)));
            }
            if self.prev_around_tail(n) != d {
                return Err(Error::Malformed(format!("prev/next mismatch at {:?}", d)));
            }
            if !self.node_alive[self.head(d)] || !self.node_alive[self.tail(d)] {
                return Err(Error::Malformed(format!("{:?} touches a dead node", d)));
            }
        }
        let mut count = vec![0usize; self.node_alive.len()];
        for d in self.darts() {
            count[self.tail(d)] += 1;
        }
        for v in self.nodes() {
            if self.darts_at(v).count() != count[v] {
                return Err(Error::Malformed(format!(
                    "rotation at node {} does not cover its darts",
                    v
                )));
            }
        }
        if self.faces_valid {
            for d in self.darts() {
                if self.face_of[d.0] >= self.face_dart.len() {
                    return Err(Error::Malformed(format!("{:?} has stale face", d)));
                }
            }
        }
        Ok(())
    }

    /// Structural fingerprint for exact restore tests.
    pub fn fingerprint(&self) -> u64 {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let mut h = DefaultHasher::new();
        self.head.hash(&mut h);
        self.next.hash(&mut h);
        self.prev.hash(&mut h);
        self.first.hash(&mut h);
        self.dart_alive.hash(&mut h);
        self.node_alive.hash(&mut h);
        h.finish()
    }

    // --- mutation primitives, shared with surgery ---

    pub(crate) fn head_slot(&self, d: usize) -> usize {
        self.head[d]
    }
    pub(crate) fn next_slot(&self, d: usize) -> usize {
        self.next[d]
    }
    pub(crate) fn prev_slot(&self, d: usize) -> usize {
        self.prev[d]
    }
    pub(crate) fn first_slot(&self, v: usize) -> usize {
        self.first[v]
    }

    pub(crate) fn set_head(&mut self, d: usize, v: usize) {
        self.head[d] = v;
    }
    pub(crate) fn set_next(&mut self, d: usize, n: usize) {
        self.next[d] = n;
    }
    pub(crate) fn set_prev(&mut self, d: usize, p: usize) {
        self.prev[d] = p;
    }
    pub(crate) fn set_first(&mut self, v: usize, d: usize) {
        self.first[v] = d;
    }
    pub(crate) fn set_dart_alive(&mut self, d: usize, alive: bool) {
        if self.dart_alive[d] != alive {
            self.live_darts = if alive { self.live_darts + 1 } else { self.live_darts - 1 };
            self.dart_alive[d] = alive;
        }
    }
    pub(crate) fn set_node_alive(&mut self, v: usize, alive: bool) {
        if self.node_alive[v] != alive {
            self.live_nodes = if alive { self.live_nodes + 1 } else { self.live_nodes - 1 };
            self.node_alive[v] = alive;
        }
    }
    pub(crate) fn push_node(&mut self) -> usize {
        self.node_alive.push(true);
        self.first.push(NIL);
        self.live_nodes += 1;
        self.node_alive.len() - 1
    }
    pub(crate) fn pop_node(&mut self) {
        debug_assert!(*self.node_alive.last().unwrap());
        self.node_alive.pop();
        self.first.pop();
        self.live_nodes -= 1;
    }
    /// Appends a dart pair for a new arc; rotation links are set by the caller.
    pub(crate) fn push_arc(&mut self, tail: usize, hd: usize) -> usize {
        let a = self.dart_alive.len() / 2;
        self.head.push(hd);
        self.head.push(tail);
        self.next.push(NIL);
        self.next.push(NIL);
        self.prev.push(NIL);
        self.prev.push(NIL);
        self.dart_alive.push(true);
        self.dart_alive.push(true);
        self.live_darts += 2;
        a
    }
    pub(crate) fn pop_arc(&mut self) {
        debug_assert!(*self.dart_alive.last().unwrap());
        for _ in 0..2 {
            self.head.pop();
            self.next.pop();
            self.prev.pop();
            self.dart_alive.pop();
        }
        self.live_darts -= 2;
    }

    pub(crate) fn nil() -> usize {
        NIL
    }
}

pub struct RotationIter<'a> {
    g: &'a PlanarGraph,
    start: usize,
    cur: usize,
    done: bool,
}

impl<'a> Iterator for RotationIter<'a> {
    type Item = Dart;

    fn next(&mut self) -> Option<Dart> {
        if self.done {
            return None;
        }
        let d = self.cur;
        self.cur = self.g.next[d];
        if self.cur == self.start {
            self.done = true;
        }
        Some(Dart(d))
    }
}

pub mod surgery;

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::generate::grid_graph;

    pub fn triangle() -> PlanarGraph {
        // nodes 0,1,2 placed counterclockwise; arcs 0->1, 1->2, 2->0
        let arcs = vec![(0, 1), (1, 2), (2, 0)];
        let rotations = vec![
            vec![Dart(0), Dart(5)],
            vec![Dart(2), Dart(1)],
            vec![Dart(4), Dart(3)],
        ];
        PlanarGraph::build_embedding(3, &arcs, &rotations).unwrap()
    }

    #[test]
    fn triangle_has_two_faces() {
        let g = triangle();
        assert_eq!(g.face_count(), 2);
        assert_eq!(g.live_node_count(), 3);
        g.validate().unwrap();
    }

    #[test]
    fn single_edge_has_one_face() {
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        assert_eq!(g.face_count(), 1);
    }

    #[test]
    fn grid_3x3_has_five_faces() {
        let g = grid_graph(3, 3).0;
        assert_eq!(g.live_node_count(), 9);
        assert_eq!(g.live_edge_count(), 12);
        assert_eq!(g.face_count(), 5);
        g.validate().unwrap();
    }

    #[test]
    fn rejects_repeated_dart() {
        let arcs = vec![(0, 1)];
        let err = PlanarGraph::build_embedding(2, &arcs, &[vec![Dart(0), Dart(0)], vec![]])
            .unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
    }

    #[test]
    fn rejects_missing_dart() {
        let arcs = vec![(0, 1)];
        let err =
            PlanarGraph::build_embedding(2, &arcs, &[vec![Dart(0)], vec![]]).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
    }

    #[test]
    fn rejects_nonplanar_rotation() {
        // K4 with a rotation system of genus 1
        let arcs = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let rotations = vec![
            vec![Dart(0), Dart(2), Dart(4)],
            vec![Dart(1), Dart(6), Dart(8)],
            vec![Dart(3), Dart(10), Dart(7)],
            vec![Dart(5), Dart(9), Dart(11)],
        ];
        // try both; at least one cyclic order of node 3 is non-planar
        let r = PlanarGraph::build_embedding(4, &arcs, &rotations);
        let rotations2 = vec![
            vec![Dart(0), Dart(2), Dart(4)],
            vec![Dart(1), Dart(6), Dart(8)],
            vec![Dart(3), Dart(10), Dart(7)],
            vec![Dart(5), Dart(11), Dart(9)],
        ];
        let r2 = PlanarGraph::build_embedding(4, &arcs, &rotations2);
        assert!(r.is_err() || r2.is_err());
    }

    #[test]
    fn dual_of_triangle() {
        let g = triangle();
        let d = g.dual().unwrap();
        assert_eq!(d.live_node_count(), 2);
        assert_eq!(d.live_edge_count(), 3);
        d.validate().unwrap();
    }

    #[test]
    fn dual_of_single_edge_is_loop() {
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let d = g.dual().unwrap();
        assert_eq!(d.live_node_count(), 1);
        assert_eq!(d.live_edge_count(), 1);
        assert_eq!(d.head(Dart(0)), d.tail(Dart(0)));
    }

    #[test]
    fn dual_of_grid() {
        let g = grid_graph(3, 3).0;
        let d = g.dual().unwrap();
        assert_eq!(d.live_node_count(), 5);
        assert_eq!(d.live_edge_count(), 12);
        d.validate().unwrap();
    }

    #[test]
    fn dual_dual_restores_rotation_and_swaps_roles() {
        for g in [triangle(), grid_graph(4, 3).0] {
            let dd = g.dual().unwrap().dual().unwrap();
            for d in g.darts() {
                assert_eq!(dd.next_around_tail(d), g.next_around_tail(d));
            }
            // partition of darts by dual-dual node equals partition by head
            for d in g.darts() {
                for e in g.darts() {
                    assert_eq!(g.head(d) == g.head(e), dd.head(d) == dd.head(e));
                }
            }
        }
    }

    #[test]
    fn face_orbits_partition_darts() {
        let g = grid_graph(4, 4).0;
        let mut seen = vec![false; g.dart_capacity()];
        for f in 0..g.face_count() {
            for d in g.face_orbit(f) {
                assert!(!seen[d.0]);
                seen[d.0] = true;
                assert_eq!(g.face_of(d), f);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
