//! Pseudoflow algebra: antisymmetric dart assignments with cached
//! inflows, residual reachability, cycle canceling and the topological
//! push-back that turns a pseudoflow into a flow.

use crate::planar::{Capacities, Dart, NodeId, PlanarGraph};
use crate::{Error, Result};

/// Capacity-respecting antisymmetric dart assignment. `f(rev d) = -f(d)`
/// is maintained by construction; per-node inflow is cached and updated
/// on every write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pseudoflow {
    f: Vec<i64>,
    inflow: Vec<i64>,
}

impl Pseudoflow {
    pub fn zero(g: &PlanarGraph) -> Self {
        Pseudoflow { f: vec![0; g.dart_capacity()], inflow: vec![0; g.node_capacity()] }
    }

    #[inline]
    pub fn get(&self, d: Dart) -> i64 {
        if d.0 < self.f.len() { self.f[d.0] } else { 0 }
    }

    /// Adds `amount` along `d` (and `-amount` along `rev d`).
    pub fn push(&mut self, g: &PlanarGraph, d: Dart, amount: i64) {
        if amount == 0 {
            return;
        }
        self.ensure_sized(g);
        self.f[d.0] += amount;
        self.f[d.0 ^ 1] -= amount;
        self.inflow[g.head(d)] += amount;
        self.inflow[g.tail(d)] -= amount;
    }

    pub fn set(&mut self, g: &PlanarGraph, d: Dart, value: i64) {
        let cur = self.get(d);
        self.push(g, d, value - cur);
    }

    #[inline]
    pub fn inflow(&self, v: NodeId) -> i64 {
        if v < self.inflow.len() { self.inflow[v] } else { 0 }
    }

    pub fn ensure_sized(&mut self, g: &PlanarGraph) {
        if self.f.len() < g.dart_capacity() {
            self.f.resize(g.dart_capacity(), 0);
        }
        if self.inflow.len() < g.node_capacity() {
            self.inflow.resize(g.node_capacity(), 0);
        }
    }

    /// Dartwise sum; inflows add.
    pub fn add(&self, g: &PlanarGraph, other: &Pseudoflow) -> Pseudoflow {
        let mut out = self.clone();
        out.ensure_sized(g);
        for (d, &x) in other.f.iter().enumerate() {
            if d < out.f.len() {
                out.f[d] += x;
            }
        }
        for (v, &x) in other.inflow.iter().enumerate() {
            if v < out.inflow.len() {
                out.inflow[v] += x;
            }
        }
        out
    }

    /// Mirror flow: every dart's value negated.
    pub fn negated(&self) -> Pseudoflow {
        Pseudoflow {
            f: self.f.iter().map(|&x| -x).collect(),
            inflow: self.inflow.iter().map(|&x| -x).collect(),
        }
    }

    /// Resyncs the inflow cache to the graph's current live structure.
    /// Needed after surgeries change which darts are alive.
    pub fn resync_inflows(&mut self, g: &PlanarGraph) {
        self.ensure_sized(g);
        for x in self.inflow.iter_mut() {
            *x = 0;
        }
        for d in g.darts() {
            self.inflow[g.head(d)] += self.get(d);
        }
    }

    /// Recomputes inflows from scratch (test cross-check).
    pub fn recomputed_inflows(&self, g: &PlanarGraph) -> Vec<i64> {
        let mut inflow = vec![0i64; g.node_capacity()];
        for d in g.darts() {
            inflow[g.head(d)] += self.get(d);
        }
        inflow
    }

    pub fn check_consistency(&self, g: &PlanarGraph) -> Result<()> {
        for d in g.darts() {
            if self.get(d) + self.get(d.rev()) != 0 {
                return Err(Error::Contract(format!("antisymmetry broken at {:?}", d)));
            }
        }
        let fresh = self.recomputed_inflows(g);
        for v in g.nodes() {
            if fresh[v] != self.inflow(v) {
                return Err(Error::Contract(format!(
                    "inflow cache stale at node {v}: cached {} actual {}",
                    self.inflow(v),
                    fresh[v]
                )));
            }
        }
        Ok(())
    }

    /// First dart exceeding its capacity, if any.
    pub fn feasibility_violation(&self, g: &PlanarGraph, c: &Capacities) -> Option<Dart> {
        g.darts().find(|&d| self.get(d) > c.get(d))
    }

    pub fn is_feasible(&self, g: &PlanarGraph, c: &Capacities) -> bool {
        self.feasibility_violation(g, c).is_none()
    }
}

#[inline]
pub fn residual(c: &Capacities, f: &Pseudoflow, d: Dart) -> i64 {
    c.get(d) - f.get(d)
}

/// Nodes reachable from `from` along darts with strictly positive
/// residual capacity.
pub fn residual_reachable(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    from: &[NodeId],
) -> Vec<bool> {
    let mut seen = vec![false; g.node_capacity()];
    let mut queue = std::collections::VecDeque::new();
    for &v in from {
        if g.node_is_alive(v) && !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for d in g.darts_at(u) {
            if residual(c, f, d) > 0 {
                let w = g.head(d);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    seen
}

/// True when some residual path runs from `from` to `to`.
pub fn reaches(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    from: &[NodeId],
    to: &[NodeId],
) -> bool {
    let seen = residual_reachable(g, c, f, from);
    to.iter().any(|&v| v < seen.len() && seen[v])
}

/// Cancels all cycles of positive flow. Inflows are unchanged and no
/// dart's flow changes sign: `f'(d) > 0` implies `f(d) > 0`.
pub fn cancel_flow_cycles(g: &PlanarGraph, f: &mut Pseudoflow) {
    let nodes = g.node_capacity();
    let mut adj: Vec<Vec<Dart>> = vec![Vec::new(); nodes];
    for d in g.darts() {
        if f.get(d) > 0 {
            adj[g.tail(d)].push(d);
        }
    }
    let mut cursor = vec![0usize; nodes];
    let mut on_stack = vec![false; nodes];
    let mut done = vec![false; nodes];
    // stack of (node, dart taken to get to the next entry)
    let mut stack: Vec<(NodeId, Option<Dart>)> = Vec::new();
    for start in 0..nodes {
        if done[start] || !g.node_is_alive(start) {
            continue;
        }
        stack.push((start, None));
        on_stack[start] = true;
        while let Some(&(u, _)) = stack.last() {
            let mut advanced = false;
            while cursor[u] < adj[u].len() {
                let d = adj[u][cursor[u]];
                if f.get(d) <= 0 {
                    cursor[u] += 1;
                    continue;
                }
                let w = g.head(d);
                if on_stack[w] {
                    // cycle found: w ... u -> w
                    let pos = stack.iter().position(|&(x, _)| x == w).unwrap();
                    let mut delta = f.get(d);
                    for entry in &stack[pos + 1..] {
                        delta = delta.min(f.get(entry.1.unwrap()));
                    }
                    f.push(g, d, -delta);
                    for i in pos + 1..stack.len() {
                        let e = stack[i].1.unwrap();
                        f.push(g, e, -delta);
                    }
                    // unwind back to w; retry from there
                    while stack.len() > pos + 1 {
                        let (x, _) = stack.pop().unwrap();
                        on_stack[x] = false;
                    }
                    advanced = true;
                    break;
                } else if !done[w] {
                    stack.push((w, Some(d)));
                    on_stack[w] = true;
                    advanced = true;
                    break;
                } else {
                    cursor[u] += 1;
                }
            }
            if !advanced {
                done[u] = true;
                on_stack[u] = false;
                stack.pop();
            }
        }
    }
}

/// Topological order of the positive-flow subgraph; `None` if cyclic.
pub fn topo_order_positive(g: &PlanarGraph, f: &Pseudoflow) -> Option<Vec<NodeId>> {
    let nodes = g.node_capacity();
    let mut indeg = vec![0usize; nodes];
    for d in g.darts() {
        if f.get(d) > 0 {
            indeg[g.head(d)] += 1;
        }
    }
    let mut order = Vec::new();
    let mut queue: Vec<NodeId> = g.nodes().filter(|&v| indeg[v] == 0).collect();
    while let Some(u) = queue.pop() {
        order.push(u);
        for d in g.darts_at(u) {
            if f.get(d) > 0 {
                let w = g.head(d);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
    }
    if order.len() == g.live_node_count() { Some(order) } else { None }
}

/// Drains every unprotected node's positive excess by sending it back
/// along flow-carrying darts (reverse topological order), then every
/// negative excess forward. The flow must be cycle-free on entry or is
/// made so first.
pub fn settle_excess(g: &PlanarGraph, f: &mut Pseudoflow, protected: &[bool]) {
    cancel_flow_cycles(g, f);
    let order = topo_order_positive(g, f).expect("positive-flow subgraph acyclic after canceling");
    for &v in order.iter().rev() {
        if protected[v] {
            continue;
        }
        let mut need = f.inflow(v);
        if need <= 0 {
            continue;
        }
        for d in g.darts_at(v) {
            let e = d.rev(); // dart into v
            let have = f.get(e);
            if have > 0 {
                let take = have.min(need);
                f.push(g, e, -take);
                need -= take;
                if need == 0 {
                    break;
                }
            }
        }
        debug_assert_eq!(need, 0, "positive excess not drainable at {v}");
    }
    for &v in order.iter() {
        if protected[v] {
            continue;
        }
        let mut need = -f.inflow(v);
        if need <= 0 {
            continue;
        }
        for d in g.darts_at(v) {
            let have = f.get(d);
            if have > 0 {
                let take = have.min(need);
                f.push(g, d, -take);
                need -= take;
                if need == 0 {
                    break;
                }
            }
        }
        debug_assert_eq!(need, 0, "negative excess not drainable at {v}");
    }
}

/// Converts a pseudoflow into a feasible flow conserving everywhere off
/// `S` and `T`, by canceling flow cycles and pushing excesses back in
/// topological order. Under the usual precondition (no residual path
/// from `S` or a positive-excess node to `T` or a negative-excess node)
/// the result is a maximum flow.
pub fn finalize_pseudoflow(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    sources: &[NodeId],
    sinks: &[NodeId],
) -> Pseudoflow {
    let mut protected = vec![false; g.node_capacity()];
    for &v in sources.iter().chain(sinks) {
        protected[v] = true;
    }
    let mut out = f.clone();
    out.ensure_sized(g);
    settle_excess(g, &mut out, &protected);
    debug_assert!(out.is_feasible(g, c));
    out
}

/// Push-back step of the cycle-to-sink procedure: drains node deficits
/// (measured by `deficit_of`, re-evaluated as the pass runs) forward
/// along this flow's own positive darts, in topological order.
/// Protected nodes absorb.
pub fn drain_deficits(
    g: &PlanarGraph,
    f: &mut Pseudoflow,
    protected: &[bool],
    deficit_of: impl Fn(&Pseudoflow, NodeId) -> i64,
) {
    cancel_flow_cycles(g, f);
    let order = topo_order_positive(g, f).expect("acyclic after canceling");
    for &v in order.iter() {
        if protected[v] {
            continue;
        }
        let mut need = deficit_of(f, v);
        if need <= 0 {
            continue;
        }
        for d in g.darts_at(v) {
            let have = f.get(d);
            if have > 0 {
                let take = have.min(need);
                f.push(g, d, -take);
                need -= take;
                if need == 0 {
                    break;
                }
            }
        }
        debug_assert_eq!(need, 0, "deficit not drainable at {v}");
    }
}

/// Sum of all dart capacities; the big-M used throughout is this plus one.
pub fn capacity_sum(g: &PlanarGraph, c: &Capacities) -> i64 {
    g.darts().map(|d| c.get(d)).sum()
}
