//! Conservation fixing along a path.
//!
//! Given a pseudoflow and a simple path, push flow between the path
//! nodes until no residual path leads from a positive-inflow path node
//! to a negative-inflow one. Both implementations raise the capacities
//! of unprocessed path darts by a big M, then process the nodes in
//! order, restoring capacities and pushing a limited Hassin flow across
//! each dart.
//!
//! The reference engine keeps the whole flow explicit and runs a full
//! dual Dijkstra per step; it stays in the repo as the oracle. The
//! efficient engine keeps circulations implicit in a face potential over
//! the faces incident to the path, runs the FR Dijkstra over a dense
//! distance table of the path-deleted dual, and recovers an explicit
//! feasible flow at the end with one more FR call plus a label-seeded
//! Dijkstra.

use crate::dense::{fr_dijkstra, DistanceTable, ExtraDart, INF};
use crate::flow::{capacity_sum, residual_reachable, Pseudoflow};
use crate::hassin::dual_dijkstra;
use crate::planar::surgery::{contract_path, SurgeryLog};
use crate::planar::{Capacities, Dart, FaceId, NodeId, PlanarGraph};
use crate::{Error, Instrument, Result};

fn path_nodes(g: &PlanarGraph, path: &[Dart]) -> Result<Vec<NodeId>> {
    let mut nodes = Vec::with_capacity(path.len() + 1);
    for (i, &d) in path.iter().enumerate() {
        if !g.dart_is_alive(d) {
            return Err(Error::Malformed(format!("{:?} is dead", d)));
        }
        if i == 0 {
            nodes.push(g.tail(d));
        } else if g.tail(d) != nodes[i] {
            return Err(Error::Malformed("path darts not consecutive".into()));
        }
        nodes.push(g.head(d));
    }
    let mut sorted = nodes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != nodes.len() {
        return Err(Error::Malformed("path not simple".into()));
    }
    Ok(nodes)
}

fn check_entry(g: &PlanarGraph, c: &Capacities, f0: &Pseudoflow) -> Result<()> {
    if let Some(d) = f0.feasibility_violation(g, c) {
        return Err(Error::Contract(format!("input flow infeasible at {:?}", d)));
    }
    Ok(())
}

/// Adds the circulation induced by dual distances to a flow; darts whose
/// faces are both unreached (other components) carry nothing.
fn add_circulation(g: &PlanarGraph, f: &mut Pseudoflow, phi: &[i64]) -> Result<()> {
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) {
            continue;
        }
        let (pl, pr) = (phi[g.face_of(d)], phi[g.face_of(d.rev())]);
        match (pl >= INF, pr >= INF) {
            (false, false) => {
                if pl != pr {
                    f.push(g, d, pl - pr);
                }
            }
            (true, true) => {}
            _ => {
                return Err(Error::Contract(format!(
                    "dart {:?} straddles reached and unreached faces",
                    d
                )))
            }
        }
    }
    Ok(())
}

/// Reference implementation: abstract loop with the explicit total flow
/// and a full dual Dijkstra per Hassin step. With instrumentation, the
/// processed-prefix residual invariants are scanned after every
/// iteration.
pub fn fix_conservation_reference(
    g: &PlanarGraph,
    path: &[Dart],
    c: &Capacities,
    f0: &Pseudoflow,
    mut instr: Option<&mut Instrument>,
) -> Result<Pseudoflow> {
    check_entry(g, c, f0)?;
    if path.is_empty() {
        return Ok(f0.clone());
    }
    let nodes = path_nodes(g, path)?;
    let m_big = capacity_sum(g, c) + 1;
    let mut cw = c.clone();
    cw.resize(g.dart_capacity());
    for &d in path {
        cw.set(d, cw.get(d) + m_big);
        cw.set(d.rev(), cw.get(d.rev()) + m_big);
    }
    let mut f = f0.clone();
    f.ensure_sized(g);
    for i in 0..path.len() {
        let di = path[i];
        for d in [di, di.rev()] {
            cw.set(d, cw.get(d) - m_big);
            if f.get(d) > cw.get(d) {
                let delta = cw.get(d) - f.get(d);
                f.push(g, d, delta);
            }
        }
        let excess = f.inflow(nodes[i]);
        let d = if excess > 0 { di } else { di.rev() };
        let rc = cw.get(d) - f.get(d);
        debug_assert!(rc >= 0);
        let val0 = rc.min(excess.abs());
        f.push(g, d, val0);
        let remaining = excess.abs() - val0;
        let phi_i = dual_dijkstra(
            g,
            |e| if e == d.rev() { remaining } else { cw.get(e) - f.get(e) },
            g.face_of(d),
        );
        add_circulation(g, &mut f, &phi_i)?;
        let val = phi_i[g.face_of(d.rev())] - phi_i[g.face_of(d)];
        f.push(g, d, val);
        if let Some(instr) = instr.as_deref_mut() {
            if instr.enabled {
                check_prefix_invariants(g, &cw, &f, &nodes, i, instr)?;
            }
        }
    }
    debug_assert!(f.is_feasible(g, c));
    Ok(f)
}

/// After iteration `i`: processed positive-inflow nodes reach no later
/// path node, processed negative ones are unreached from later nodes,
/// and no processed positive node reaches a processed negative one.
fn check_prefix_invariants(
    g: &PlanarGraph,
    cw: &Capacities,
    f: &Pseudoflow,
    nodes: &[NodeId],
    i: usize,
    instr: &mut Instrument,
) -> Result<()> {
    instr.check(
        f.feasibility_violation(g, cw).is_none(),
        "flow exceeds working capacities",
    )?;
    for j in 0..=i {
        let pj = nodes[j];
        if f.inflow(pj) > 0 {
            let seen = residual_reachable(g, cw, f, &[pj]);
            let ok = nodes[j + 1..].iter().all(|&q| !seen[q]);
            instr.check(ok, "positive path node reaches a later path node")?;
            let ok2 = nodes[..=i].iter().all(|&q| f.inflow(q) >= 0 || !seen[q]);
            instr.check(ok2, "processed positive node reaches a processed negative one")?;
        } else if f.inflow(pj) < 0 {
            let seen = residual_reachable(g, cw, f, &nodes[j + 1..]);
            instr.check(!seen[pj], "later path node reaches a processed negative node")?;
        }
    }
    Ok(())
}

/// Cyclic occurrence order of the faces incident to the path edges: the
/// corners around the contracted path, filtered to faces bordering a
/// path dart, consecutive duplicates merged.
fn boundary_occurrences(g: &PlanarGraph, path: &[Dart]) -> Result<(Vec<FaceId>, Vec<FaceId>)> {
    let mut edge_faces: Vec<FaceId> = Vec::new();
    for &d in path {
        edge_faces.push(g.face_of(d));
        edge_faces.push(g.face_of(d.rev()));
    }
    let mut xs = edge_faces.clone();
    xs.sort_unstable();
    xs.dedup();
    let in_xs = |f: FaceId| xs.binary_search(&f).is_ok();
    let mut scratch = g.clone();
    let mut log = SurgeryLog::new();
    let (w, _) = contract_path(&mut scratch, &mut log, path)?;
    let mut occ: Vec<FaceId> = scratch
        .darts_at(w)
        .map(|e| g.face_of(e.rev()))
        .filter(|&fc| in_xs(fc))
        .collect();
    // merge consecutive duplicates, cyclically
    occ.dedup();
    while occ.len() > 1 && occ.first() == occ.last() {
        occ.pop();
    }
    if occ.is_empty() {
        occ = xs.clone();
    }
    Ok((occ, xs))
}

/// Incremental state of the efficient implementation. Exposed so the
/// per-dart steps can be driven and checked directly.
pub struct EfficientFix<'a> {
    g: &'a PlanarGraph,
    path: &'a [Dart],
    pub nodes: Vec<NodeId>,
    pos: Vec<usize>,
    cw: Capacities,
    m_big: i64,
    /// Explicit flow; differs from the input only on path darts.
    pub flow: Pseudoflow,
    /// Accumulated face potential over the boundary faces.
    pub phi: Vec<i64>,
    /// Inflow of the total flow at each path node.
    pub v: Vec<i64>,
    xs: Vec<FaceId>,
    table: DistanceTable,
}

impl<'a> EfficientFix<'a> {
    pub fn new(
        g: &'a PlanarGraph,
        path: &'a [Dart],
        c: &Capacities,
        f0: &Pseudoflow,
    ) -> Result<Self> {
        check_entry(g, c, f0)?;
        let nodes = path_nodes(g, path)?;
        let mut pos = vec![usize::MAX; g.node_capacity()];
        for (i, &p) in nodes.iter().enumerate() {
            pos[p] = i;
        }
        let (occ, xs) = boundary_occurrences(g, path)?;
        let mut is_path_dart = vec![false; g.dart_capacity()];
        for &d in path {
            is_path_dart[d.0] = true;
            is_path_dart[d.rev().0] = true;
        }
        // dense distances over the dual with the path darts removed,
        // lengths are residual capacities w.r.t. the input flow
        let mut total = 1i64;
        let mut edges = Vec::with_capacity(g.live_dart_count());
        for d in g.darts() {
            if is_path_dart[d.0] {
                continue;
            }
            let l = c.get(d) - f0.get(d);
            if l < 0 {
                return Err(Error::Contract(format!("negative residual on {:?}", d)));
            }
            total += l;
            edges.push((g.face_of(d.rev()), g.face_of(d), l));
        }
        let csr = crate::dense::Csr::new(g.face_count(), &edges);
        let table = DistanceTable::from_csr(&csr, &occ, total);
        let m_big = capacity_sum(g, c) + 1;
        let mut cw = c.clone();
        cw.resize(g.dart_capacity());
        for &d in path {
            cw.set(d, cw.get(d) + m_big);
            cw.set(d.rev(), cw.get(d.rev()) + m_big);
        }
        let mut flow = f0.clone();
        flow.ensure_sized(g);
        let v = nodes.iter().map(|&p| flow.inflow(p)).collect();
        Ok(EfficientFix {
            g,
            path,
            nodes,
            pos,
            cw,
            m_big,
            flow,
            phi: vec![0; g.face_count()],
            v,
            xs,
            table,
        })
    }

    #[inline]
    fn total_flow_on(&self, d: Dart) -> i64 {
        self.flow.get(d) + self.phi[self.g.face_of(d)] - self.phi[self.g.face_of(d.rev())]
    }

    #[inline]
    fn total_residual(&self, d: Dart) -> i64 {
        self.cw.get(d) - self.total_flow_on(d)
    }

    fn bump_v(&mut self, d: Dart, amount: i64) {
        let (t, h) = (self.g.tail(d), self.g.head(d));
        if self.pos[t] != usize::MAX {
            self.v[self.pos[t]] -= amount;
        }
        if self.pos[h] != usize::MAX {
            self.v[self.pos[h]] += amount;
        }
    }

    /// Lowers the capacities of `d_i` and its reverse back to their real
    /// values and clamps the total flow to the new capacity, adjusting
    /// the explicit part so the implicit representation stays
    /// consistent.
    pub fn capacity_restore_step(&mut self, i: usize) {
        let di = self.path[i];
        for d in [di, di.rev()] {
            self.cw.set(d, self.cw.get(d) - self.m_big);
            let old_flow = self.total_flow_on(d);
            let new_flow = old_flow.min(self.cw.get(d));
            if new_flow != old_flow {
                self.flow.push(self.g, d, new_flow - old_flow);
                self.bump_v(d, new_flow - old_flow);
            }
        }
    }

    /// Pushes `min(residual, |v[p_i]|)` directly across the chosen dart.
    /// Returns the dart and the amount pushed.
    pub fn saturate_step(&mut self, i: usize) -> (Dart, i64) {
        let di = self.path[i];
        let d = if self.v[i] > 0 { di } else { di.rev() };
        let rc = self.total_residual(d);
        debug_assert!(rc >= 0);
        let val = rc.min(self.v[i].abs());
        if val != 0 {
            self.flow.push(self.g, d, val);
            self.bump_v(d, val);
        }
        (d, val)
    }

    fn extras(&self, override_dart: Option<(Dart, i64)>) -> Vec<ExtraDart> {
        let mut out = Vec::with_capacity(2 * self.path.len());
        for &p in self.path {
            for d in [p, p.rev()] {
                let len = match override_dart {
                    Some((od, l)) if od == d => l,
                    _ => self.cw.get(d) - self.flow.get(d),
                };
                out.push(ExtraDart {
                    tail: self.g.face_of(d.rev()),
                    head: self.g.face_of(d),
                    len,
                });
            }
        }
        out
    }

    fn fr(&self, extras: &[ExtraDart], src: FaceId) -> Result<Vec<i64>> {
        let phi = &self.phi;
        let dist = fr_dijkstra(&self.table, extras, &|x| phi[x], src)?;
        let mut per_face = vec![INF; self.g.face_count()];
        for (o, &face) in self.table.boundary.iter().enumerate() {
            if dist[o] < per_face[face] {
                per_face[face] = dist[o];
            }
        }
        for &x in &self.xs {
            if per_face[x] >= INF {
                return Err(Error::Contract(format!("boundary face {x} unreached")));
            }
        }
        Ok(per_face)
    }

    /// Hassin step across `d` with the remaining excess as the limit:
    /// one FR call from the face left of `d`, accumulate the potential,
    /// keep the pair's circulation component explicit.
    pub fn hassin_step(&mut self, i: usize, d: Dart) -> Result<()> {
        let limit = self.v[i].abs();
        let adj = limit - self.phi[self.g.face_of(d)] + self.phi[self.g.face_of(d.rev())];
        let extras = self.extras(Some((d.rev(), adj)));
        let phi_i = self.fr(&extras, self.g.face_of(d))?;
        let val = phi_i[self.g.face_of(d.rev())] - phi_i[self.g.face_of(d)];
        if val != 0 {
            self.flow.push(self.g, d, val);
            self.bump_v(d, val);
        }
        for &x in &self.xs {
            self.phi[x] += phi_i[x];
        }
        Ok(())
    }

    /// Consistency of the implicit representation: the tracked inflow
    /// array equals the explicit flow's inflow at every path node (the
    /// potential part circulates, contributing nothing).
    pub fn v_consistent(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, &p)| self.v[i] == self.flow.inflow(p))
    }

    pub fn run(mut self) -> Result<Pseudoflow> {
        for i in 0..self.path.len() {
            self.capacity_restore_step(i);
            let (d, _) = self.saturate_step(i);
            self.hassin_step(i, d)?;
            debug_assert!(self.v_consistent());
        }
        recover_circulation(
            self.g,
            &self.cw,
            &self.flow,
            &self.phi,
            &self.xs,
            &self.table,
            &self.extras(None),
        )
    }
}

/// Recovers an explicit feasible pseudoflow from the implicit
/// representation: one FR call gives exact distance labels on the
/// boundary faces, which seed a plain Dijkstra over the whole dual (the
/// possibly negative path darts connect only seeded faces). Adding the
/// resulting circulation to the explicit part preserves every inflow.
pub fn recover_circulation(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    phi: &[i64],
    xs: &[FaceId],
    table: &DistanceTable,
    extras: &[ExtraDart],
) -> Result<Pseudoflow> {
    let x0 = xs[0];
    let psi = fr_dijkstra(table, extras, &|x| phi[x], x0)?;
    let mut chi = vec![INF; g.face_count()];
    for (o, &face) in table.boundary.iter().enumerate() {
        if psi[o] < INF {
            let val = psi[o] - phi[x0] + phi[face];
            if val < chi[face] {
                chi[face] = val;
            }
        }
    }
    let mut seeded = vec![false; g.face_count()];
    for &x in xs {
        if chi[x] >= INF {
            return Err(Error::Contract(format!(
                "boundary face {x} unreachable in recovery"
            )));
        }
        seeded[x] = true;
    }
    // seeded Dijkstra over the full dual with lengths c - f
    let fcount = g.face_count();
    let mut deg = vec![0usize; fcount];
    for d in g.darts() {
        deg[g.face_of(d.rev())] += 1;
    }
    let mut off = vec![0usize; fcount + 1];
    for f_ in 0..fcount {
        off[f_ + 1] = off[f_] + deg[f_];
    }
    let mut to = vec![0usize; off[fcount]];
    let mut w = vec![0i64; off[fcount]];
    let mut pos = off.clone();
    for d in g.darts() {
        let t = g.face_of(d.rev());
        to[pos[t]] = g.face_of(d);
        w[pos[t]] = c.get(d) - f.get(d);
        pos[t] += 1;
    }
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(i64, usize)>> =
        std::collections::BinaryHeap::new();
    for &x in xs {
        heap.push(std::cmp::Reverse((chi[x], x)));
    }
    let mut settled = vec![false; fcount];
    while let Some(std::cmp::Reverse((du, u))) = heap.pop() {
        if settled[u] || du > chi[u] {
            continue;
        }
        settled[u] = true;
        for i in off[u]..off[u + 1] {
            let vtx = to[i];
            let nd = du + w[i];
            if nd < chi[vtx] {
                if seeded[vtx] {
                    return Err(Error::Contract(
                        "negative reduced length leaked past the boundary labels".into(),
                    ));
                }
                chi[vtx] = nd;
                heap.push(std::cmp::Reverse((nd, vtx)));
            }
        }
    }
    let mut out = f.clone();
    add_circulation(g, &mut out, &chi)?;
    if let Some(d) = out.feasibility_violation(g, c) {
        return Err(Error::Contract(format!("recovered flow infeasible at {:?}", d)));
    }
    Ok(out)
}

/// Efficient implementation of the conservation fix. Same contract as
/// the reference; additionally its per-node inflow vector over the path
/// matches the reference exactly and the two outputs differ by a
/// circulation.
pub fn fix_conservation_on_path(
    g: &PlanarGraph,
    path: &[Dart],
    c: &Capacities,
    f0: &Pseudoflow,
) -> Result<Pseudoflow> {
    if path.is_empty() {
        check_entry(g, c, f0)?;
        return Ok(f0.clone());
    }
    EfficientFix::new(g, path, c, f0)?.run()
}

/// Output contract of both engines, used by tests and instrumented runs:
/// the delta conserves off the path, and no positive-inflow path node
/// residually reaches a negative-inflow one.
pub fn check_fix_contract(
    g: &PlanarGraph,
    path: &[Dart],
    c: &Capacities,
    f0: &Pseudoflow,
    f: &Pseudoflow,
) -> Result<()> {
    let nodes = path_nodes(g, path)?;
    let on_path = {
        let mut m = vec![false; g.node_capacity()];
        for &p in &nodes {
            m[p] = true;
        }
        m
    };
    for v in g.nodes() {
        if !on_path[v] && f.inflow(v) != f0.inflow(v) {
            return Err(Error::Contract(format!("delta violates conservation at {v}")));
        }
    }
    if let Some(d) = f.feasibility_violation(g, c) {
        return Err(Error::Contract(format!("output infeasible at {:?}", d)));
    }
    let positive: Vec<NodeId> = nodes.iter().copied().filter(|&p| f.inflow(p) > 0).collect();
    let negative: Vec<NodeId> = nodes.iter().copied().filter(|&p| f.inflow(p) < 0).collect();
    if crate::flow::reaches(g, c, f, &positive, &negative) {
        return Err(Error::Contract(
            "positive path node residually reaches a negative one".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::grid_graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pseudoflow(g: &PlanarGraph, c: &Capacities, rng: &mut ChaCha8Rng) -> Pseudoflow {
        let mut f = Pseudoflow::zero(g);
        for a in 0..g.arc_capacity() {
            let d = Dart::forward(a);
            if !g.dart_is_alive(d) {
                continue;
            }
            let lo = -c.get(d.rev());
            let hi = c.get(d);
            if lo < hi {
                f.push(g, d, rng.gen_range(lo..=hi));
            }
        }
        f
    }

    fn random_path(g: &PlanarGraph, max_len: usize, rng: &mut ChaCha8Rng) -> Vec<Dart> {
        let n = g.live_node_count();
        let mut cur = rng.gen_range(0..n);
        let mut used = vec![false; g.node_capacity()];
        used[cur] = true;
        let mut path = Vec::new();
        while path.len() < max_len {
            let options: Vec<Dart> = g.darts_at(cur).filter(|&d| !used[g.head(d)]).collect();
            if options.is_empty() {
                break;
            }
            let d = options[rng.gen_range(0..options.len())];
            used[g.head(d)] = true;
            path.push(d);
            cur = g.head(d);
        }
        path
    }

    #[test]
    fn single_dart_net_push() {
        // p1 -> p2, cap 10 both ways, flow -4 gives inflow +4 at p1
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 10);
        c.resize(g.dart_capacity());
        let mut f0 = Pseudoflow::zero(&g);
        f0.push(&g, Dart(0), -4);
        assert_eq!(f0.inflow(0), 4);
        for engine in [0, 1] {
            let out = if engine == 0 {
                fix_conservation_reference(&g, &[Dart(0)], &c, &f0, None).unwrap()
            } else {
                fix_conservation_on_path(&g, &[Dart(0)], &c, &f0).unwrap()
            };
            assert_eq!(out.inflow(0), 0);
            assert_eq!(out.inflow(1), 0);
            check_fix_contract(&g, &[Dart(0)], &c, &f0, &out).unwrap();
        }
    }

    #[test]
    fn conserving_input_keeps_inflows() {
        let (g, _) = grid_graph(3, 3);
        let c = Capacities::new(g.dart_capacity(), 5);
        let f0 = Pseudoflow::zero(&g);
        let path = random_path(&g, 4, &mut ChaCha8Rng::seed_from_u64(1));
        let out = fix_conservation_reference(&g, &path, &c, &f0, None).unwrap();
        for v in g.nodes() {
            assert_eq!(out.inflow(v), 0);
        }
        let out2 = fix_conservation_on_path(&g, &path, &c, &f0).unwrap();
        for v in g.nodes() {
            assert_eq!(out2.inflow(v), 0);
        }
    }

    #[test]
    fn bounded_cut_limits_push() {
        // excess 5 at node 0 but only capacity 2 onward from node 1
        let arcs = vec![(0, 1), (1, 2), (2, 3)];
        let rotations = vec![
            vec![Dart(0)],
            vec![Dart(1), Dart(2)],
            vec![Dart(3), Dart(4)],
            vec![Dart(5)],
        ];
        let g = PlanarGraph::build_embedding(4, &arcs, &rotations).unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 9);
        c.set(Dart(1), 9); // allow the inflow-producing back flow
        c.set(Dart(2), 2);
        c.set(Dart(4), 2);
        let mut f0 = Pseudoflow::zero(&g);
        f0.push(&g, Dart(0), -5); // inflow +5 at node 0
        let path = vec![Dart(0), Dart(2), Dart(4)];
        let out = fix_conservation_reference(&g, &path, &c, &f0, None).unwrap();
        assert_eq!(out.inflow(0), 0);
        check_fix_contract(&g, &path, &c, &f0, &out).unwrap();
        let eff = fix_conservation_on_path(&g, &path, &c, &f0).unwrap();
        for v in g.nodes() {
            assert_eq!(eff.inflow(v), out.inflow(v));
        }
        check_fix_contract(&g, &path, &c, &f0, &eff).unwrap();
    }

    #[test]
    fn engines_agree_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..40 {
            let side = rng.gen_range(3..6);
            let (g, _) = grid_graph(side, side);
            let mut c = Capacities::new(g.dart_capacity(), 0);
            for a in 0..g.arc_capacity() {
                c.set(Dart::forward(a), rng.gen_range(0..12));
                c.set(Dart::backward(a), rng.gen_range(0..12));
            }
            let f0 = random_pseudoflow(&g, &c, &mut rng);
            let path = random_path(&g, rng.gen_range(1..8), &mut rng);
            if path.is_empty() {
                continue;
            }
            let reference = fix_conservation_reference(&g, &path, &c, &f0, None).unwrap();
            let efficient = fix_conservation_on_path(&g, &path, &c, &f0).unwrap();
            check_fix_contract(&g, &path, &c, &f0, &reference).unwrap();
            check_fix_contract(&g, &path, &c, &f0, &efficient).unwrap();
            // identical inflows everywhere: outputs differ by a circulation
            for v in g.nodes() {
                assert_eq!(reference.inflow(v), efficient.inflow(v), "trial {trial} node {v}");
            }
        }
    }

    #[test]
    fn instrumented_reference_checks_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (g, _) = grid_graph(4, 4);
        let mut c = Capacities::new(g.dart_capacity(), 0);
        for a in 0..g.arc_capacity() {
            c.set(Dart::forward(a), rng.gen_range(0..10));
            c.set(Dart::backward(a), rng.gen_range(0..10));
        }
        let f0 = random_pseudoflow(&g, &c, &mut rng);
        let path = random_path(&g, 6, &mut rng);
        let mut instr = Instrument::enabled();
        fix_conservation_reference(&g, &path, &c, &f0, Some(&mut instr)).unwrap();
        assert!(instr.checkpoints > 0);
    }

    #[test]
    fn step_arithmetic() {
        // residual 3 against excess 5: saturate pushes up to the residual
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 3);
        c.set(Dart(1), 9);
        let mut f0 = Pseudoflow::zero(&g);
        f0.push(&g, Dart(0), -5); // +5 at node 0
        let path = [Dart(0)];
        let mut fix = EfficientFix::new(&g, &path, &c, &f0).unwrap();
        fix.capacity_restore_step(0);
        assert_eq!(fix.v[0], 5);
        let (d, pushed) = fix.saturate_step(0);
        assert_eq!(d, Dart(0));
        assert_eq!(pushed, 5); // residual 3 - (-5) = 8, excess 5
        assert_eq!(fix.v[0], 0);
        assert!(fix.v_consistent());
    }

    #[test]
    fn restore_clamps_flow() {
        // old flow 9 against restored cap 4 -> new flow 4
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 4);
        c.set(Dart(1), 20);
        let f0 = Pseudoflow::zero(&g);
        let path = [Dart(0)];
        let mut fix = EfficientFix::new(&g, &path, &c, &f0).unwrap();
        // as if 9 units were pushed under the +M capacity
        fix.flow.push(&g, Dart(0), 9);
        fix.bump_v(Dart(0), 9);
        fix.capacity_restore_step(0);
        assert_eq!(fix.flow.get(Dart(0)), 4);
        assert_eq!(fix.v[1], 4);
        assert!(fix.v_consistent());
    }
}
