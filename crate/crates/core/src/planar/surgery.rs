//! Reversible graph surgeries.
//!
//! Every mutation is recorded as a cell edit in a `SurgeryLog`; undoing a
//! log restores the previous structure exactly, including index
//! assignment. Faces are maintained incrementally by arc insertion and
//! recomputed after deletions, contractions and undos.

use super::{Capacities, Dart, NodeId, PlanarGraph};
use crate::{Error, Result};

#[derive(Debug, Clone)]
enum Edit {
    Head { d: usize, old: usize },
    Next { d: usize, old: usize },
    Prev { d: usize, old: usize },
    First { v: usize, old: usize },
    DartAlive { d: usize, old: bool },
    NodeAlive { v: usize, old: bool },
    ArcPushed,
    NodePushed,
    Cap { d: usize, old: i64 },
    CapLen { old: usize },
}

#[derive(Debug, Default)]
pub struct SurgeryLog {
    edits: Vec<Edit>,
}

impl SurgeryLog {
    pub fn new() -> Self {
        SurgeryLog { edits: Vec::new() }
    }

    pub fn mark(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Rolls back to `mark` and recomputes faces.
    pub fn undo_to(&mut self, mark: usize, g: &mut PlanarGraph, caps: &mut Capacities) {
        while self.edits.len() > mark {
            match self.edits.pop().unwrap() {
                Edit::Head { d, old } => g.set_head(d, old),
                Edit::Next { d, old } => g.set_next(d, old),
                Edit::Prev { d, old } => g.set_prev(d, old),
                Edit::First { v, old } => g.set_first(v, old),
                Edit::DartAlive { d, old } => g.set_dart_alive(d, old),
                Edit::NodeAlive { v, old } => g.set_node_alive(v, old),
                Edit::ArcPushed => g.pop_arc(),
                Edit::NodePushed => g.pop_node(),
                Edit::Cap { d, old } => caps.set(Dart(d), old),
                Edit::CapLen { old } => caps.resize(old),
            }
        }
        g.recompute_faces();
    }

    pub fn undo_all(&mut self, g: &mut PlanarGraph, caps: &mut Capacities) {
        self.undo_to(0, g, caps);
    }

    fn set_head(&mut self, g: &mut PlanarGraph, d: usize, v: usize) {
        self.edits.push(Edit::Head { d, old: g.head_slot(d) });
        g.set_head(d, v);
    }
    fn set_next(&mut self, g: &mut PlanarGraph, d: usize, n: usize) {
        self.edits.push(Edit::Next { d, old: g.next_slot(d) });
        g.set_next(d, n);
    }
    fn set_prev(&mut self, g: &mut PlanarGraph, d: usize, p: usize) {
        self.edits.push(Edit::Prev { d, old: g.prev_slot(d) });
        g.set_prev(d, p);
    }
    fn set_first(&mut self, g: &mut PlanarGraph, v: usize, d: usize) {
        self.edits.push(Edit::First { v, old: g.first_slot(v) });
        g.set_first(v, d);
    }
    fn set_dart_alive(&mut self, g: &mut PlanarGraph, d: usize, alive: bool) {
        self.edits.push(Edit::DartAlive { d, old: g.dart_is_alive(Dart(d)) });
        g.set_dart_alive(d, alive);
    }
    fn set_node_alive(&mut self, g: &mut PlanarGraph, v: usize, alive: bool) {
        self.edits.push(Edit::NodeAlive { v, old: g.node_is_alive(v) });
        g.set_node_alive(v, alive);
    }

    pub fn set_cap(&mut self, caps: &mut Capacities, d: Dart, value: i64) {
        self.edits.push(Edit::Cap { d: d.0, old: caps.get(d) });
        caps.set(d, value);
    }
}

fn splice_out(g: &mut PlanarGraph, log: &mut SurgeryLog, d: Dart) {
    let t = g.tail(d);
    let n = g.next_slot(d.0);
    if n == d.0 {
        log.set_first(g, t, PlanarGraph::nil());
    } else {
        let p = g.prev_slot(d.0);
        log.set_next(g, p, n);
        log.set_prev(g, n, p);
        if g.first_slot(t) == d.0 {
            log.set_first(g, t, n);
        }
    }
    log.set_dart_alive(g, d.0, false);
}

fn splice_in_before(g: &mut PlanarGraph, log: &mut SurgeryLog, d: Dart, before: Dart) {
    debug_assert_eq!(g.tail(d), g.tail(before));
    let p = g.prev_slot(before.0);
    log.set_next(g, p, d.0);
    log.set_prev(g, d.0, p);
    log.set_next(g, d.0, before.0);
    log.set_prev(g, before.0, d.0);
}

fn attach_only_dart(g: &mut PlanarGraph, log: &mut SurgeryLog, d: Dart) {
    let t = g.tail(d);
    debug_assert_eq!(g.first_slot(t), PlanarGraph::nil());
    log.set_first(g, t, d.0);
    log.set_next(g, d.0, d.0);
    log.set_prev(g, d.0, d.0);
}

fn push_arc_logged(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
    tail: NodeId,
    head: NodeId,
    cap_fwd: i64,
    cap_bwd: i64,
) -> usize {
    log.edits.push(Edit::ArcPushed);
    let a = g.push_arc(tail, head);
    log.edits.push(Edit::CapLen { old: caps.len() });
    caps.resize(g.dart_capacity());
    log.set_cap(caps, Dart::forward(a), cap_fwd);
    log.set_cap(caps, Dart::backward(a), cap_bwd);
    a
}

/// Deletes an edge, splicing both darts out of their rotations.
/// Invalidates faces.
pub fn delete_edge(g: &mut PlanarGraph, log: &mut SurgeryLog, arc: usize) {
    let d = Dart::forward(arc);
    debug_assert!(g.dart_is_alive(d));
    splice_out(g, log, d);
    splice_out(g, log, d.rev());
    g.invalidate_faces();
}

/// Deletes a node together with all incident edges. Invalidates faces.
pub fn delete_node(g: &mut PlanarGraph, log: &mut SurgeryLog, v: NodeId) {
    while let Some(d) = g.first_dart(v) {
        delete_edge(g, log, d.arc());
    }
    log.set_node_alive(g, v, false);
    g.invalidate_faces();
}

/// Deletes a batch of nodes and recomputes faces once.
pub fn delete_nodes(g: &mut PlanarGraph, log: &mut SurgeryLog, nodes: &[NodeId]) {
    for &v in nodes {
        delete_node(g, log, v);
    }
    g.recompute_faces();
}

/// Inserts an arc from `tail(e1)` to `tail(e2)` across the face both
/// darts lie on, splitting it in two. The new dart is placed
/// immediately before `e1` in its rotation, its reverse before `e2`.
/// Faces stay valid: the orbit side cut off behind the new arc gets a
/// fresh face id.
pub fn insert_arc_in_face(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
    e1: Dart,
    e2: Dart,
    cap_fwd: i64,
    cap_bwd: i64,
) -> Result<usize> {
    if !g.faces_valid() {
        return Err(Error::Contract("insert_arc_in_face needs fresh faces".into()));
    }
    if g.face_of(e1) != g.face_of(e2) {
        return Err(Error::Malformed(format!(
            "{:?} and {:?} are not on a common face",
            e1, e2
        )));
    }
    let f = g.face_of(e1);
    let a = push_arc_logged(g, log, caps, g.tail(e1), g.tail(e2), cap_fwd, cap_bwd);
    let n = Dart::forward(a);
    splice_in_before(g, log, n, e1);
    splice_in_before(g, log, n.rev(), e2);
    g.split_face_after_insert(f, n);
    Ok(a)
}

impl PlanarGraph {
    /// After hubbing a face: triangle `i` is `(orbit[i], rev(spoke[i+1]),
    /// spoke[i])`; the first keeps the old face id, the rest get fresh ones.
    fn split_face_after_hub(&mut self, f: usize, orbit: &[Dart], spokes: &[Dart]) {
        self.face_of.resize(self.dart_capacity(), 0);
        let s = orbit.len();
        for i in 0..s {
            let id = if i == 0 {
                self.face_dart[f] = orbit[0].0;
                f
            } else {
                self.face_dart.push(orbit[i].0);
                self.face_dart.len() - 1
            };
            self.face_of[orbit[i].0] = id;
            self.face_of[spokes[(i + 1) % s].rev().0] = id;
            self.face_of[spokes[i].0] = id;
        }
    }

    /// After inserting dart pair `n` across face `f`, reassigns the side
    /// behind `rev(n)` (the orbit `rev(n), e1, ...`) to a fresh face id.
    fn split_face_after_insert(&mut self, f: usize, n: Dart) {
        self.face_of.resize(self.dart_capacity(), 0);
        let new_id = self.face_dart.len();
        self.face_dart.push(n.rev().0);
        let mut d = n.rev();
        loop {
            self.face_of[d.0] = new_id;
            d = self.face_next(d);
            if d == n.rev() {
                break;
            }
        }
        self.face_of[n.0] = f;
        self.face_dart[f] = n.0;
    }
}

/// Kind of terminal being split off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalKind {
    Source,
    Sink,
}

/// Splits a terminal: adds a pendant node `u'` carrying the terminal
/// role, connected to `v` by a single arc whose capacity is the sum of
/// the dart capacities leaving (source) or entering (sink) `v`. Returns
/// the new node.
pub fn split_terminal(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
    v: NodeId,
    kind: TerminalKind,
) -> NodeId {
    let total: i64 = g
        .darts_at(v)
        .map(|d| match kind {
            TerminalKind::Source => caps.get(d),
            TerminalKind::Sink => caps.get(d.rev()),
        })
        .sum();
    attach_pendant(g, log, caps, v, kind, total)
}

/// Pendant node joined to `v` by one arc of the given capacity, oriented
/// by the terminal kind.
pub fn attach_pendant(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
    v: NodeId,
    kind: TerminalKind,
    cap: i64,
) -> NodeId {
    log.edits.push(Edit::NodePushed);
    let u = g.push_node();
    let anchor = g.first_dart(v);
    let a = match kind {
        TerminalKind::Source => push_arc_logged(g, log, caps, u, v, cap, 0),
        TerminalKind::Sink => push_arc_logged(g, log, caps, v, u, cap, 0),
    };
    let at_u = if g.tail(Dart::forward(a)) == u { Dart::forward(a) } else { Dart::backward(a) };
    let at_v = at_u.rev();
    match anchor {
        Some(b) => splice_in_before(g, log, at_v, b),
        None => attach_only_dart(g, log, at_v),
    }
    attach_only_dart(g, log, at_u);
    g.invalidate_faces();
    u
}

/// Contracts a single non-loop dart, merging `head(d)` into `tail(d)`.
/// The rotation of the merged node is the splice of the two rotations at
/// the positions of `d` and `rev(d)`. Invalidates faces.
pub fn contract_dart(g: &mut PlanarGraph, log: &mut SurgeryLog, d: Dart) -> Result<NodeId> {
    let u = g.tail(d);
    let v = g.head(d);
    if u == v {
        return Err(Error::Malformed(format!("cannot contract self-loop {:?}", d)));
    }
    if !g.dart_is_alive(d) {
        return Err(Error::Malformed(format!("{:?} is dead", d)));
    }
    let a = g.prev_slot(d.0);
    let b = g.next_slot(d.0);
    let x = g.prev_slot(d.rev().0);
    let y = g.next_slot(d.rev().0);
    let v_darts: Vec<Dart> = g.darts_at(v).collect();
    for &e in &v_darts {
        if e != d.rev() {
            log.set_head(g, e.rev().0, u);
        }
    }
    let u_single = a == d.0;
    let v_single = y == d.rev().0;
    match (u_single, v_single) {
        (true, true) => {
            log.set_first(g, u, PlanarGraph::nil());
        }
        (true, false) => {
            log.set_next(g, x, y);
            log.set_prev(g, y, x);
            log.set_first(g, u, y);
        }
        (false, true) => {
            log.set_next(g, a, b);
            log.set_prev(g, b, a);
            if g.first_slot(u) == d.0 {
                log.set_first(g, u, b);
            }
        }
        (false, false) => {
            log.set_next(g, a, y);
            log.set_prev(g, y, a);
            log.set_next(g, x, b);
            log.set_prev(g, b, x);
            if g.first_slot(u) == d.0 {
                log.set_first(g, u, b);
            }
        }
    }
    log.set_dart_alive(g, d.0, false);
    log.set_dart_alive(g, d.rev().0, false);
    log.set_first(g, v, PlanarGraph::nil());
    log.set_node_alive(g, v, false);
    g.invalidate_faces();
    Ok(u)
}

/// Contracts a simple path of consecutive darts, merging every node into
/// the tail of the first dart. Returns the supernode and the merged
/// nodes in path order.
pub fn contract_path(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    path: &[Dart],
) -> Result<(NodeId, Vec<NodeId>)> {
    if path.is_empty() {
        return Err(Error::Malformed("empty path".into()));
    }
    let mut nodes = vec![g.tail(path[0])];
    for (i, &d) in path.iter().enumerate() {
        if !g.dart_is_alive(d) {
            return Err(Error::Malformed(format!("{:?} is dead", d)));
        }
        if i > 0 && g.tail(d) != g.head(path[i - 1]) {
            return Err(Error::Malformed("path darts not consecutive".into()));
        }
        nodes.push(g.head(d));
    }
    {
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != nodes.len() {
            return Err(Error::Malformed("path is not simple".into()));
        }
    }
    let super_node = g.tail(path[0]);
    for &d in path {
        contract_dart(g, log, d)?;
    }
    g.recompute_faces();
    Ok((super_node, nodes))
}

/// Adds arcs `v_i -> v_{i+1}` between consecutive nodes of a (cyclically
/// ordered) node list, each embedded across a face shared by the pair.
/// Capacities are `cap_fwd` forward and 0 backward. Returns the new arc
/// ids in order.
pub fn insert_arcs_along_cycle(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
    nodes: &[NodeId],
    cap_fwd: i64,
) -> Result<Vec<usize>> {
    let mut arcs = Vec::new();
    for w in nodes.windows(2) {
        let (vi, vj) = (w[0], w[1]);
        let mut found = None;
        'outer: for e1 in g.darts_at(vi) {
            for e2 in g.darts_at(vj) {
                if g.face_of(e1) == g.face_of(e2) {
                    found = Some((e1, e2));
                    break 'outer;
                }
            }
        }
        let (e1, e2) = found.ok_or_else(|| {
            Error::Malformed(format!("nodes {vi} and {vj} share no face; insertion would cross"))
        })?;
        arcs.push(insert_arc_in_face(g, log, caps, e1, e2, cap_fwd, 0)?);
    }
    Ok(arcs)
}

/// Triangulates every face and 2-connects the graph with zero-capacity
/// arcs. Simple faces of four or more sides are fanned from their lowest
/// node; faces with repeated boundary nodes (and 2-gons) get a hub node
/// joined to every corner. Requires a graph without self-loops or
/// isolated nodes.
pub fn triangulate_and_biconnect(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
) -> Result<()> {
    for d in g.darts() {
        if g.head(d) == g.tail(d) {
            return Err(Error::Malformed("triangulation requires no self-loops".into()));
        }
    }
    for v in g.nodes() {
        if g.first_dart(v).is_none() {
            return Err(Error::Malformed(format!("isolated node {v}")));
        }
    }
    if !g.faces_valid() {
        g.recompute_faces();
    }
    let orbits: Vec<Vec<Dart>> = (0..g.face_count()).map(|f| g.face_orbit(f)).collect();
    for orbit in orbits {
        let s = orbit.len();
        if s == 3 {
            continue;
        }
        let mut tails: Vec<NodeId> = orbit.iter().map(|&d| g.tail(d)).collect();
        let simple = {
            tails.sort_unstable();
            tails.dedup();
            tails.len() == s
        };
        if s >= 4 && simple {
            fan_face(g, log, caps, &orbit)?;
        } else {
            hub_face(g, log, caps, &orbit);
        }
    }
    debug_assert!((0..g.face_count()).all(|f| g.face_orbit(f).len() == 3));
    Ok(())
}

fn fan_face(
    g: &mut PlanarGraph,
    log: &mut SurgeryLog,
    caps: &mut Capacities,
    orbit: &[Dart],
) -> Result<()> {
    let s = orbit.len();
    // anchor at the lowest boundary node for determinism
    let i0 = (0..s)
        .min_by_key(|&i| (g.tail(orbit[i]), orbit[i].0))
        .unwrap();
    let at = |i: usize| orbit[(i0 + i) % s];
    let mut e1 = at(0);
    for j in 2..s - 1 {
        let a = insert_arc_in_face(g, log, caps, e1, at(j), 0, 0)?;
        e1 = Dart::forward(a);
    }
    Ok(())
}

fn hub_face(g: &mut PlanarGraph, log: &mut SurgeryLog, caps: &mut Capacities, orbit: &[Dart]) {
    let s = orbit.len();
    let face = g.face_of(orbit[0]);
    log.edits.push(Edit::NodePushed);
    let h = g.push_node();
    let mut spokes = Vec::with_capacity(s);
    for &fi in orbit {
        let w = g.tail(fi);
        log.edits.push(Edit::ArcPushed);
        let a = g.push_arc(h, w);
        log.edits.push(Edit::CapLen { old: caps.len() });
        caps.resize(g.dart_capacity());
        log.set_cap(caps, Dart::forward(a), 0);
        log.set_cap(caps, Dart::backward(a), 0);
        splice_in_before(g, log, Dart::backward(a), fi);
        spokes.push(Dart::forward(a));
    }
    // around the hub the spokes run opposite to the boundary walk
    for i in 0..s {
        let cur = spokes[i];
        let nxt = spokes[(i + s - 1) % s];
        log.set_next(g, cur.0, nxt.0);
        log.set_prev(g, nxt.0, cur.0);
    }
    log.set_first(g, h, spokes[0].0);
    // the face splits into s triangles (w_i, w_{i+1}, h)
    g.split_face_after_hub(face, orbit, &spokes);
}

/// Induced subgraph on a node set, preserving the embedding. Self-loops
/// on kept nodes are dropped when `drop_self_loops` is set.
#[derive(Debug)]
pub struct Extraction {
    pub graph: PlanarGraph,
    /// new node id -> old node id
    pub old_node: Vec<NodeId>,
    /// old node id -> new node id
    pub new_node: Vec<Option<NodeId>>,
    /// new arc id -> old arc id
    pub old_arc: Vec<usize>,
}

impl Extraction {
    pub fn caps(&self, caps: &Capacities) -> Capacities {
        let mut out = Capacities::new(self.graph.dart_capacity(), 0);
        for (na, &oa) in self.old_arc.iter().enumerate() {
            out.set(Dart::forward(na), caps.get(Dart::forward(oa)));
            out.set(Dart::backward(na), caps.get(Dart::backward(oa)));
        }
        out
    }

    pub fn old_dart(&self, d: Dart) -> Dart {
        let oa = self.old_arc[d.arc()];
        if d.is_forward() { Dart::forward(oa) } else { Dart::backward(oa) }
    }
}

pub fn extract_induced(
    g: &PlanarGraph,
    keep: &[bool],
    drop_self_loops: bool,
) -> Result<Extraction> {
    let mut new_node = vec![None; g.node_capacity()];
    let mut old_node = Vec::new();
    for v in g.nodes() {
        if keep[v] {
            new_node[v] = Some(old_node.len());
            old_node.push(v);
        }
    }
    let keep_arc = |a: usize| -> bool {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) {
            return false;
        }
        let (t, h) = (g.tail(d), g.head(d));
        if !keep[t] || !keep[h] {
            return false;
        }
        !(drop_self_loops && t == h)
    };
    let mut new_arc = vec![None; g.arc_capacity()];
    let mut old_arc = Vec::new();
    let mut arcs = Vec::new();
    for a in 0..g.arc_capacity() {
        if keep_arc(a) {
            new_arc[a] = Some(old_arc.len());
            old_arc.push(a);
            let d = Dart::forward(a);
            arcs.push((new_node[g.tail(d)].unwrap(), new_node[g.head(d)].unwrap()));
        }
    }
    let mut rotations = vec![Vec::new(); old_node.len()];
    for (nv, &ov) in old_node.iter().enumerate() {
        for d in g.darts_at(ov) {
            if let Some(na) = new_arc[d.arc()] {
                rotations[nv].push(if d.is_forward() {
                    Dart::forward(na)
                } else {
                    Dart::backward(na)
                });
            }
        }
    }
    let graph = PlanarGraph::build_embedding(old_node.len(), &arcs, &rotations)?;
    Ok(Extraction { graph, old_node, new_node, old_arc })
}
