//! Dense distance graphs and an FR-style Dijkstra.
//!
//! A `DistanceTable` stores boundary-to-boundary shortest-path lengths
//! of a piece whose boundary nodes lie on one face, indexed by boundary
//! *occurrences* in cyclic order (a node may appear more than once on
//! the face walk; duplicated rows keep the Monge structure intact).
//! `fr_dijkstra` computes single-source distances in the complete graph
//! induced by the table plus a set of extra darts, under reduced lengths
//! w.r.t. a feasible price function, relaxing whole Monge submatrices
//! through range-minimum structures instead of individual arcs.

use crate::planar::{DartMap, NodeId, PlanarGraph};
use crate::{Error, Result};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

pub const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    pub off: Vec<usize>,
    pub to: Vec<usize>,
    pub w: Vec<i64>,
}

impl Csr {
    pub fn new(n: usize, edges: &[(usize, usize, i64)]) -> Csr {
        let mut deg = vec![0usize; n];
        for &(u, _, _) in edges {
            deg[u] += 1;
        }
        let mut off = vec![0usize; n + 1];
        for v in 0..n {
            off[v + 1] = off[v] + deg[v];
        }
        let mut to = vec![0usize; edges.len()];
        let mut w = vec![0i64; edges.len()];
        let mut pos = off.clone();
        for &(u, v, len) in edges {
            to[pos[u]] = v;
            w[pos[u]] = len;
            pos[u] += 1;
        }
        Csr { off, to, w }
    }

    pub fn node_count(&self) -> usize {
        self.off.len() - 1
    }

    pub fn dijkstra(&self, src: usize, dist: &mut Vec<i64>) {
        dist.clear();
        dist.resize(self.node_count(), INF);
        let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
        dist[src] = 0;
        heap.push(Reverse((0, src)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            for i in self.off[u]..self.off[u + 1] {
                let v = self.to[i];
                let nd = du + self.w[i];
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
    }

    pub fn max_weight(&self) -> i64 {
        self.w.iter().copied().max().unwrap_or(0)
    }
}

/// Reusable single-source workspace. Small integer lengths use a Dial
/// bucket queue; otherwise a binary heap. Either way the search stops
/// once every target is settled.
pub(crate) struct DijkstraBuf {
    dist: Vec<i64>,
    stamp: Vec<u32>,
    round: u32,
    buckets: Vec<Vec<u32>>,
}

impl DijkstraBuf {
    pub fn new(n: usize) -> DijkstraBuf {
        DijkstraBuf { dist: vec![0; n], stamp: vec![0; n], round: 0, buckets: Vec::new() }
    }

    #[inline]
    pub fn get(&self, v: usize) -> i64 {
        if self.stamp[v] == self.round { self.dist[v] } else { INF }
    }

    #[inline]
    fn set(&mut self, v: usize, d: i64) {
        self.stamp[v] = self.round;
        self.dist[v] = d;
    }

    /// Distances from `src` until all flagged targets are settled.
    pub fn run(&mut self, csr: &Csr, src: usize, is_target: &[bool], mut remaining: usize) {
        self.round += 1;
        let span = csr.max_weight();
        if span <= 4096 {
            self.run_dial(csr, src, is_target, remaining, span as usize + 1);
            return;
        }
        let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
        self.set(src, 0);
        heap.push(Reverse((0, src)));
        while let Some(Reverse((du, u))) = heap.pop() {
            if du > self.get(u) {
                continue;
            }
            if is_target[u] {
                remaining -= 1;
                if remaining == 0 {
                    return;
                }
            }
            for i in csr.off[u]..csr.off[u + 1] {
                let v = csr.to[i];
                let nd = du + csr.w[i];
                if nd < self.get(v) {
                    self.set(v, nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
    }

    fn run_dial(
        &mut self,
        csr: &Csr,
        src: usize,
        is_target: &[bool],
        mut remaining: usize,
        width: usize,
    ) {
        if self.buckets.len() < width {
            self.buckets.resize_with(width, Vec::new);
        }
        self.set(src, 0);
        self.buckets[0].push(src as u32);
        let mut cur = 0i64;
        let mut live = 1usize;
        while live > 0 {
            let slot = (cur as usize) % width;
            while let Some(u32v) = self.buckets[slot].pop() {
                let u = u32v as usize;
                live -= 1;
                if self.get(u) != cur {
                    continue; // stale entry
                }
                if is_target[u] {
                    remaining -= 1;
                    if remaining == 0 {
                        for b in self.buckets.iter_mut() {
                            b.clear();
                        }
                        return;
                    }
                }
                for i in csr.off[u]..csr.off[u + 1] {
                    let v = csr.to[i];
                    let nd = cur + csr.w[i];
                    if nd < self.get(v) {
                        self.set(v, nd);
                        self.buckets[(nd as usize) % width].push(v as u32);
                        live += 1;
                    }
                }
            }
            cur += 1;
        }
    }
}

/// Boundary-to-boundary distances of a piece. `boundary` is the cyclic
/// occurrence list; `d(i, j)` the exact in-piece distance between the
/// underlying nodes; unreachable pairs hold `inf` (total length plus
/// one, clamped out of Monge submatrices).
#[derive(Debug, Clone)]
pub struct DistanceTable {
    pub boundary: Vec<NodeId>,
    dist: Vec<i64>,
    pub inf: i64,
}

impl DistanceTable {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> i64 {
        self.dist[i * self.boundary.len() + j]
    }

    /// Builds the table by one nonnegative-length Dijkstra per distinct
    /// boundary node (the multiple-source shortest-path stand-in; the
    /// interface accepts any cyclically ordered boundary on one face).
    pub fn build(
        h: &PlanarGraph,
        boundary: &[NodeId],
        lengths: &DartMap<i64>,
    ) -> Result<DistanceTable> {
        let mut total = 1i64;
        let mut edges = Vec::with_capacity(h.live_dart_count());
        for d in h.darts() {
            let l = lengths.get(d);
            if l < 0 {
                return Err(Error::Contract(format!("negative length on {:?}", d)));
            }
            if l >= INF {
                continue; // absent dart
            }
            total += l;
            edges.push((h.tail(d), h.head(d), l));
        }
        // boundary must lie on a single face
        let on_one_face = (0..h.face_count()).any(|f| {
            let mut tails = vec![false; h.node_capacity()];
            for d in h.face_orbit(f) {
                tails[h.tail(d)] = true;
            }
            boundary.iter().all(|&x| tails[x])
        });
        if !on_one_face {
            return Err(Error::Contract("boundary nodes not on a single face".into()));
        }
        let csr = Csr::new(h.node_capacity(), &edges);
        Ok(Self::from_csr(&csr, boundary, total))
    }

    pub(crate) fn from_csr(csr: &Csr, boundary: &[NodeId], inf: i64) -> DistanceTable {
        let r = boundary.len();
        let mut distinct: Vec<NodeId> = boundary.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let mut is_target = vec![false; csr.node_count()];
        for &x in &distinct {
            is_target[x] = true;
        }
        let mut per_node: std::collections::HashMap<NodeId, Vec<i64>> =
            std::collections::HashMap::new();
        let mut buf = DijkstraBuf::new(csr.node_count());
        for &x in &distinct {
            buf.run(csr, x, &is_target, distinct.len());
            per_node.insert(x, boundary.iter().map(|&y| buf.get(y).min(inf)).collect());
        }
        let mut dist = vec![0i64; r * r];
        for i in 0..r {
            let row = &per_node[&boundary[i]];
            dist[i * r..(i + 1) * r].copy_from_slice(row);
        }
        DistanceTable { boundary: boundary.to_vec(), dist, inf }
    }
}

/// Consecutive-block pairs of the recursive halving partition; every
/// ordered pair of distinct indices falls in exactly one submatrix.
pub fn monge_partition(r: usize) -> Vec<(Range<usize>, Range<usize>)> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, r)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo < 2 {
            continue;
        }
        let mid = (lo + hi) / 2;
        out.push((lo..mid, mid..hi));
        out.push((mid..hi, lo..mid));
        stack.push((lo, mid));
        stack.push((mid, hi));
    }
    out
}

/// Checks the Monge condition on an explicit matrix view.
pub fn is_monge(nrows: usize, ncols: usize, entry: impl Fn(usize, usize) -> i64) -> bool {
    for i in 0..nrows.saturating_sub(1) {
        for j in 0..ncols.saturating_sub(1) {
            if entry(i, j) + entry(i + 1, j + 1) > entry(i, j + 1) + entry(i + 1, j) {
                return false;
            }
        }
    }
    true
}

/// Range-minimum structure over the columns of a Monge matrix.
///
/// A balanced tree over column intervals stores, per internal node, the
/// first row at which the right child's minimum strictly beats the
/// left's (monotone in the row by the Monge condition). Queries descend
/// breakpoints, so both construction and queries are polylogarithmic on
/// top of entry evaluations. Argmin ties resolve to the lowest column.
pub struct MongeRmq<'a> {
    entry: Box<dyn Fn(usize, usize) -> i64 + 'a>,
    nrows: usize,
    ncols: usize,
    bp: Vec<usize>,
}

impl<'a> MongeRmq<'a> {
    pub fn build(
        nrows: usize,
        ncols: usize,
        entry: impl Fn(usize, usize) -> i64 + 'a,
    ) -> MongeRmq<'a> {
        let mut rmq = MongeRmq {
            entry: Box::new(entry),
            nrows,
            ncols,
            bp: vec![0; 4 * ncols.max(1)],
        };
        if ncols > 0 && nrows > 0 {
            rmq.build_node(1, 0, ncols);
        }
        rmq
    }

    fn build_node(&mut self, k: usize, lo: usize, hi: usize) {
        if hi - lo <= 1 {
            return;
        }
        let mid = (lo + hi) / 2;
        self.build_node(2 * k, lo, mid);
        self.build_node(2 * k + 1, mid, hi);
        // first row where the right child strictly wins
        let mut a = 0usize;
        let mut b = self.nrows;
        while a < b {
            let m = (a + b) / 2;
            let l = self.eval(2 * k, lo, mid, m).0;
            let r = self.eval(2 * k + 1, mid, hi, m).0;
            if r < l {
                b = m;
            } else {
                a = m + 1;
            }
        }
        self.bp[k] = a;
    }

    fn eval(&self, k: usize, lo: usize, hi: usize, row: usize) -> (i64, usize) {
        if hi - lo == 1 {
            return ((self.entry)(row, lo), lo);
        }
        let mid = (lo + hi) / 2;
        if row < self.bp[k] {
            self.eval(2 * k, lo, mid, row)
        } else {
            self.eval(2 * k + 1, mid, hi, row)
        }
    }

    /// Minimum and lowest argmin of row `row` over columns `[j1, j2)`.
    pub fn query(&self, row: usize, j1: usize, j2: usize) -> (i64, usize) {
        assert!(row < self.nrows && j1 < j2 && j2 <= self.ncols, "range out of bounds");
        let mut best: Option<(i64, usize)> = None;
        self.query_rec(1, 0, self.ncols, j1, j2, row, &mut best);
        best.unwrap()
    }

    fn query_rec(
        &self,
        k: usize,
        lo: usize,
        hi: usize,
        j1: usize,
        j2: usize,
        row: usize,
        best: &mut Option<(i64, usize)>,
    ) {
        if j2 <= lo || hi <= j1 {
            return;
        }
        if j1 <= lo && hi <= j2 {
            let (v, c) = self.eval(k, lo, hi, row);
            if best.map_or(true, |(bv, _)| v < bv) {
                *best = Some((v, c));
            }
            return;
        }
        let mid = (lo + hi) / 2;
        self.query_rec(2 * k, lo, mid, j1, j2, row, best);
        self.query_rec(2 * k + 1, mid, hi, j1, j2, row, best);
    }
}

/// `min_{j1 <= j <= j2} entry(i, j)` with its lowest argmin (inclusive
/// range, matching the table-query convention).
pub fn monge_rmq_query(rmq: &MongeRmq<'_>, i: usize, j1: usize, j2: usize) -> (i64, usize) {
    rmq.query(i, j1, j2 + 1)
}

/// A dart available to `fr_dijkstra` beyond the table, with endpoints on
/// the boundary node set. Lengths may be negative as long as the reduced
/// lengths are not.
#[derive(Debug, Clone, Copy)]
pub struct ExtraDart {
    pub tail: NodeId,
    pub head: NodeId,
    pub len: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Node { occ: u32 },
    Span { sub: u32, row: u32, lo: u32, hi: u32 },
}

/// Single-source distances from `source` over (complete graph induced by
/// the table) plus `extras`, w.r.t. lengths reduced by the feasible
/// price function `phi`. Returns the reduced distance per boundary
/// occurrence (`INF` when unreachable). Detecting a negative reduced
/// extra length is a contract error.
pub fn fr_dijkstra(
    table: &DistanceTable,
    extras: &[ExtraDart],
    phi: &dyn Fn(NodeId) -> i64,
    source: NodeId,
) -> Result<Vec<i64>> {
    let r = table.len();
    let mut occ_of: std::collections::HashMap<NodeId, Vec<usize>> =
        std::collections::HashMap::new();
    for (i, &x) in table.boundary.iter().enumerate() {
        occ_of.entry(x).or_default().push(i);
    }
    if !occ_of.contains_key(&source) {
        return Err(Error::Contract(format!("source {source} is not a boundary node")));
    }
    let reduced = |i: usize, j: usize| -> i64 {
        let d = table.d(i, j);
        if d >= table.inf {
            return INF;
        }
        d + phi(table.boundary[i]) - phi(table.boundary[j])
    };
    // extras grouped per tail occurrence, pre-reduced
    let mut extra_at: Vec<Vec<(usize, i64)>> = vec![Vec::new(); r];
    for e in extras {
        let red = e.len + phi(e.tail) - phi(e.head);
        if red < 0 {
            return Err(Error::Contract(format!(
                "negative reduced length {} on extra {}->{}",
                red, e.tail, e.head
            )));
        }
        let heads = occ_of
            .get(&e.head)
            .ok_or_else(|| Error::Contract(format!("extra head {} off boundary", e.head)))?;
        let head_occ = heads[0];
        let tails = occ_of
            .get(&e.tail)
            .ok_or_else(|| Error::Contract(format!("extra tail {} off boundary", e.tail)))?;
        for &t in tails {
            extra_at[t].push((head_occ, red));
        }
    }
    let pairs = monge_partition(r);
    let submatrices: Vec<MongeRmq<'_>> = pairs
        .iter()
        .map(|(rows, cols)| {
            let (r0, c0, clen) = (rows.start, cols.start, cols.len());
            MongeRmq::build(rows.len(), clen, move |ri, ci| {
                reduced(r0 + ri, c0 + (clen - 1 - ci)) // reversed columns are Monge
            })
        })
        .collect();
    let mut row_membership: Vec<Vec<(u32, u32)>> = vec![Vec::new(); r];
    for (si, (rows, _)) in pairs.iter().enumerate() {
        for o in rows.clone() {
            row_membership[o].push((si as u32, (o - rows.start) as u32));
        }
    }
    let col_occ = |si: usize, ci: usize| -> usize {
        let cols = &pairs[si].1;
        cols.start + (cols.len() - 1 - ci)
    };

    let mut dist = vec![INF; r];
    let mut settled = vec![false; r];
    let mut remaining = r;
    let mut heap: BinaryHeap<Reverse<(i64, Item)>> = BinaryHeap::new();
    for &o in &occ_of[&source] {
        dist[o] = 0;
        heap.push(Reverse((0, Item::Node { occ: o as u32 })));
    }
    while remaining > 0 {
        let Some(Reverse((key, item))) = heap.pop() else { break };
        match item {
            Item::Node { occ } => {
                let o = occ as usize;
                if settled[o] || key > dist[o] {
                    continue;
                }
                settle(
                    o,
                    key,
                    &mut dist,
                    &mut settled,
                    &mut remaining,
                    &mut heap,
                    &submatrices,
                    &row_membership,
                    &extra_at,
                );
            }
            Item::Span { sub, row, lo, hi } => {
                let (si, ri) = (sub as usize, row as usize);
                let (val, ci) = submatrices[si].query(ri, lo as usize, hi as usize);
                let row_occ = pairs[si].0.start + ri;
                let total = dist[row_occ].saturating_add(val);
                let o = col_occ(si, ci);
                if !settled[o] && total < INF {
                    dist[o] = total;
                    settle(
                        o,
                        total,
                        &mut dist,
                        &mut settled,
                        &mut remaining,
                        &mut heap,
                        &submatrices,
                        &row_membership,
                        &extra_at,
                    );
                }
                // split around the reported column and keep offering
                for (a, b) in [(lo as usize, ci), (ci + 1, hi as usize)] {
                    if a < b {
                        let (v, _) = submatrices[si].query(ri, a, b);
                        let t = dist[row_occ].saturating_add(v);
                        if t < INF {
                            heap.push(Reverse((
                                t,
                                Item::Span { sub, row, lo: a as u32, hi: b as u32 },
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(dist)
}

#[allow(clippy::too_many_arguments)]
fn settle(
    o: usize,
    d: i64,
    dist: &mut [i64],
    settled: &mut [bool],
    remaining: &mut usize,
    heap: &mut BinaryHeap<Reverse<(i64, Item)>>,
    submatrices: &[MongeRmq<'_>],
    row_membership: &[Vec<(u32, u32)>],
    extra_at: &[Vec<(usize, i64)>],
) {
    settled[o] = true;
    dist[o] = d;
    *remaining -= 1;
    for &(si, ri) in &row_membership[o] {
        let ncols = submatrices[si as usize].ncols;
        let (val, _) = submatrices[si as usize].query(ri as usize, 0, ncols);
        let t = d.saturating_add(val);
        if t < INF {
            heap.push(Reverse((t, Item::Span { sub: si, row: ri, lo: 0, hi: ncols as u32 })));
        }
    }
    for &(head_occ, red) in &extra_at[o] {
        let nd = d + red;
        if !settled[head_occ] && nd < dist[head_occ] {
            dist[head_occ] = nd;
            heap.push(Reverse((nd, Item::Node { occ: head_occ as u32 })));
        }
    }
}

/// Reference implementation: plain Dijkstra over the materialized graph
/// (every table pair as an arc, plus extras), used by tests as the
/// oracle for `fr_dijkstra`.
pub fn explicit_dijkstra(
    table: &DistanceTable,
    extras: &[ExtraDart],
    phi: &dyn Fn(NodeId) -> i64,
    source: NodeId,
) -> Vec<i64> {
    let r = table.len();
    let mut occs: std::collections::HashMap<NodeId, Vec<usize>> = std::collections::HashMap::new();
    for (i, &x) in table.boundary.iter().enumerate() {
        occs.entry(x).or_default().push(i);
    }
    let mut dist = vec![INF; r];
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
    for &o in &occs[&source] {
        dist[o] = 0;
        heap.push(Reverse((0, o)));
    }
    while let Some(Reverse((du, u))) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for v in 0..r {
            if v == u || table.d(u, v) >= table.inf {
                continue;
            }
            let red = table.d(u, v) + phi(table.boundary[u]) - phi(table.boundary[v]);
            let nd = du + red;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
        for e in extras {
            if table.boundary[u] == e.tail {
                let red = e.len + phi(e.tail) - phi(e.head);
                for &v in &occs[&e.head] {
                    let nd = du + red;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(Reverse((nd, v)));
                    }
                }
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::grid_graph;
    use crate::planar::Dart;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_piece(
        rows: usize,
        cols: usize,
        seed: u64,
    ) -> (PlanarGraph, Vec<NodeId>, DartMap<i64>) {
        let (g, _) = grid_graph(rows, cols);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut len = DartMap::new(g.dart_capacity(), 0);
        for d in g.darts() {
            len.set(d, rng.gen_range(0..20));
        }
        // outer boundary in cyclic order: top row, right col, bottom row, left col
        let mut boundary = Vec::new();
        for c in 0..cols {
            boundary.push(c);
        }
        for r in 1..rows {
            boundary.push(r * cols + cols - 1);
        }
        for c in (0..cols - 1).rev() {
            boundary.push((rows - 1) * cols + c);
        }
        for r in (1..rows - 1).rev() {
            boundary.push(r * cols);
        }
        (g, boundary, len)
    }

    fn bellman_ford(g: &PlanarGraph, len: &DartMap<i64>, src: NodeId) -> Vec<i64> {
        let mut dist = vec![INF; g.node_capacity()];
        dist[src] = 0;
        for _ in 0..g.live_node_count() {
            let mut changed = false;
            for d in g.darts() {
                let (u, v) = (g.tail(d), g.head(d));
                if dist[u] < INF && dist[u] + len.get(d) < dist[v] {
                    dist[v] = dist[u] + len.get(d);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    #[test]
    fn single_boundary_node() {
        let (g, _, len) = grid_piece(2, 2, 1);
        let t = DistanceTable::build(&g, &[0], &len).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.d(0, 0), 0);
    }

    #[test]
    fn one_way_pair() {
        // two nodes joined by one dart of length 7 and no return path
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let mut len = DartMap::new(g.dart_capacity(), 0);
        len.set(Dart(0), 7);
        len.set(Dart(1), INF); // effectively unreachable; clamped to table.inf
        let t = DistanceTable::build(&g, &[0, 1], &len).unwrap();
        assert_eq!(t.d(0, 1), 7);
        assert_eq!(t.d(0, 0), 0);
        assert_eq!(t.d(1, 0), t.inf);
    }

    #[test]
    fn table_matches_bellman_ford() {
        let (g, boundary, len) = grid_piece(3, 4, 77);
        let t = DistanceTable::build(&g, &boundary, &len).unwrap();
        for (i, &x) in boundary.iter().enumerate() {
            let bf = bellman_ford(&g, &len, x);
            for (j, &y) in boundary.iter().enumerate() {
                assert_eq!(t.d(i, j), bf[y]);
            }
        }
    }

    #[test]
    fn rejects_negative_length() {
        let (g, boundary, mut len) = grid_piece(2, 3, 3);
        len.set(Dart(0), -1);
        assert!(DistanceTable::build(&g, &boundary, &len).is_err());
    }

    #[test]
    fn partition_covers_all_pairs_once() {
        for r in [1usize, 2, 3, 5, 8, 13] {
            let mut count = vec![vec![0usize; r]; r];
            for (rows, cols) in monge_partition(r) {
                for i in rows.clone() {
                    for j in cols.clone() {
                        count[i][j] += 1;
                    }
                }
            }
            for i in 0..r {
                for j in 0..r {
                    assert_eq!(count[i][j], usize::from(i != j), "pair ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn table_submatrices_are_monge() {
        let (g, boundary, len) = grid_piece(4, 4, 5);
        let t = DistanceTable::build(&g, &boundary, &len).unwrap();
        for (rows, cols) in monge_partition(t.len()) {
            let clen = cols.len();
            assert!(is_monge(rows.len(), clen, |ri, ci| t
                .d(rows.start + ri, cols.start + (clen - 1 - ci))));
        }
    }

    fn random_monge(nrows: usize, ncols: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
        // affine part plus submodular rectangle bumps
        let mut m = vec![vec![0i64; ncols]; nrows];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = rng.gen_range(-8..8) + (i as i64) * rng.gen_range(0..3)
                    - (j as i64) * rng.gen_range(0..3);
            }
        }
        // make the random part Monge by accumulating nonpositive density
        let mut density = vec![vec![0i64; ncols]; nrows];
        for row in density.iter_mut() {
            for x in row.iter_mut() {
                *x = -rng.gen_range(0..4);
            }
        }
        for i in 0..nrows {
            for j in 0..ncols {
                let up = if i > 0 { m[i - 1][j] } else { 0 };
                let left = if j > 0 { m[i][j - 1] } else { 0 };
                let diag = if i > 0 && j > 0 { m[i - 1][j - 1] } else { 0 };
                m[i][j] = up + left - diag + density[i][j];
            }
        }
        m
    }

    #[test]
    fn monge_rmq_trivial_cases() {
        let m = vec![vec![0i64, 1], vec![2, 2]];
        let rmq = MongeRmq::build(2, 2, |i, j| m[i][j]);
        assert_eq!(monge_rmq_query(&rmq, 0, 0, 1), (0, 0));
        assert_eq!(monge_rmq_query(&rmq, 1, 0, 1), (2, 0)); // tie -> lowest index
        let single = MongeRmq::build(1, 1, |_, _| 42);
        assert_eq!(monge_rmq_query(&single, 0, 0, 0), (42, 0));
    }

    #[test]
    fn monge_rmq_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..300 {
            let nrows = rng.gen_range(1..10);
            let ncols = rng.gen_range(1..10);
            let m = random_monge(nrows, ncols, &mut rng);
            assert!(is_monge(nrows, ncols, |i, j| m[i][j]));
            let rmq = MongeRmq::build(nrows, ncols, |i, j| m[i][j]);
            for _ in 0..20 {
                let i = rng.gen_range(0..nrows);
                let j1 = rng.gen_range(0..ncols);
                let j2 = rng.gen_range(j1..ncols);
                let got = monge_rmq_query(&rmq, i, j1, j2);
                let mut want = (i64::MAX, usize::MAX);
                for j in j1..=j2 {
                    if m[i][j] < want.0 {
                        want = (m[i][j], j);
                    }
                }
                assert_eq!(got, want);
            }
        }
    }

    fn feasible_phi(table: &DistanceTable, extras: &[ExtraDart], rng: &mut ChaCha8Rng) -> Vec<i64> {
        // distances from a random boundary node over the materialized
        // graph form a feasible price function
        let src = table.boundary[rng.gen_range(0..table.len())];
        let zero = |_: NodeId| 0i64;
        let d = explicit_dijkstra(table, extras, &zero, src);
        // per-node value: min over occurrences (they agree)
        let mut phi = std::collections::HashMap::new();
        for (i, &x) in table.boundary.iter().enumerate() {
            let e = phi.entry(x).or_insert(INF);
            *e = (*e).min(d[i]);
        }
        table.boundary.iter().map(|x| phi[x]).collect()
    }

    #[test]
    fn fr_equals_explicit_dijkstra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..60 {
            let rows = rng.gen_range(2..5);
            let cols = rng.gen_range(2..5);
            let (g, boundary, len) = grid_piece(rows, cols, 1000 + trial);
            let t = DistanceTable::build(&g, &boundary, &len).unwrap();
            let mut extras = Vec::new();
            for _ in 0..rng.gen_range(0..5) {
                let a = boundary[rng.gen_range(0..boundary.len())];
                let b = boundary[rng.gen_range(0..boundary.len())];
                extras.push(ExtraDart { tail: a, head: b, len: rng.gen_range(0..15) });
            }
            let phi_vals = feasible_phi(&t, &extras, &mut rng);
            let mut phi_by_node = std::collections::HashMap::new();
            for (i, &x) in t.boundary.iter().enumerate() {
                phi_by_node.insert(x, phi_vals[i]);
            }
            let phi = |x: NodeId| phi_by_node[&x];
            let src = boundary[rng.gen_range(0..boundary.len())];
            let got = fr_dijkstra(&t, &extras, &phi, src).unwrap();
            let want = explicit_dijkstra(&t, &extras, &phi, src);
            assert_eq!(got, want, "trial {trial}");
        }
    }

    #[test]
    fn fr_price_shift_telescopes() {
        let (g, boundary, len) = grid_piece(3, 3, 9);
        let t = DistanceTable::build(&g, &boundary, &len).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi_vals = feasible_phi(&t, &[], &mut rng);
        let mut by_node = std::collections::HashMap::new();
        for (i, &x) in t.boundary.iter().enumerate() {
            by_node.insert(x, phi_vals[i]);
        }
        let phi = |x: NodeId| by_node[&x];
        let zero = |_: NodeId| 0i64;
        let src = boundary[0];
        let reduced = fr_dijkstra(&t, &[], &phi, src).unwrap();
        let plain = fr_dijkstra(&t, &[], &zero, src).unwrap();
        for (i, &y) in t.boundary.iter().enumerate() {
            assert_eq!(reduced[i], plain[i] + phi(src) - phi(y));
        }
    }

    #[test]
    fn fr_detects_infeasible_phi() {
        let (g, boundary, len) = grid_piece(2, 3, 8);
        let t = DistanceTable::build(&g, &boundary, &len).unwrap();
        let extras = [ExtraDart { tail: boundary[0], head: boundary[1], len: 0 }];
        let bad = |x: NodeId| if x == boundary[1] { 1_000 } else { 0 };
        assert!(fr_dijkstra(&t, &extras, &bad, boundary[0]).is_err());
    }

    #[test]
    fn fr_single_node() {
        let (g, _, len) = grid_piece(2, 2, 2);
        let t = DistanceTable::build(&g, &[0], &len).unwrap();
        let zero = |_: NodeId| 0i64;
        let d = fr_dijkstra(&t, &[], &zero, 0).unwrap();
        assert_eq!(d, vec![0]);
    }
}
