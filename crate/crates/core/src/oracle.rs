//! Blocking-flow max-flow oracle (Dinic) on arbitrary directed graphs,
//! plus a slow BFS-augmentation second opinion used by tests. Multiple
//! sources and sinks are handled with an artificial super source and
//! sink; planarity is not required.

use crate::flow::Pseudoflow;
use crate::planar::{Capacities, Dart, NodeId, PlanarGraph};

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64, // remaining residual
}

#[derive(Debug, Clone)]
pub struct Dinic {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Dinic { n, edges: Vec::new(), adj: vec![Vec::new(); n], level: Vec::new(), iter: Vec::new() }
    }

    /// Adds an edge with capacity `cap` from `u` to `v` and `cap_rev`
    /// back; the pair shares residual storage like a dart pair.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64, cap_rev: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap });
        self.edges.push(Edge { to: u, cap: cap_rev });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Net flow pushed through edge `id` (forward direction), given its
    /// original forward capacity.
    pub fn edge_flow(&self, id: usize, original_cap: i64) -> i64 {
        original_cap - self.edges[id].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level = vec![-1; self.n];
        let mut q = std::collections::VecDeque::new();
        self.level[s] = 0;
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let edge = &self.edges[e];
                if edge.cap > 0 && self.level[edge.to] < 0 {
                    self.level[edge.to] = self.level[u] + 1;
                    q.push_back(edge.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: i64) -> i64 {
        if u == t {
            return limit;
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let (to, cap) = (self.edges[e].to, self.edges[e].cap);
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.edges[e].cap -= pushed;
                    self.edges[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0i64;
        while self.bfs(s, t) {
            self.iter = vec![0; self.n];
            loop {
                let pushed = self.dfs(s, t, i64::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

/// Max-flow oracle over a dart graph, restricted to nodes where
/// `allowed` holds (all live nodes when `None`), computed on residual
/// capacities `c - f0`. Returns the flow delta on darts and its value.
pub fn maxflow_on_residual(
    g: &PlanarGraph,
    c: &Capacities,
    f0: &Pseudoflow,
    allowed: Option<&[bool]>,
    sources: &[NodeId],
    sinks: &[NodeId],
) -> (i64, Pseudoflow) {
    let n = g.node_capacity();
    let ok = |v: NodeId| allowed.map_or(true, |a| a[v]);
    let mut din = Dinic::new(n + 2);
    let ss = n;
    let tt = n + 1;
    let mut arc_edges: Vec<(usize, usize, i64)> = Vec::new(); // (arc, edge id, fwd residual)
    let mut big = 1i64;
    for d in g.darts() {
        big += (c.get(d) - f0.get(d)).max(0);
    }
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) {
            continue;
        }
        let (u, v) = (g.tail(d), g.head(d));
        if !ok(u) || !ok(v) || u == v {
            continue;
        }
        let cf = (c.get(d) - f0.get(d)).max(0);
        let cb = (c.get(d.rev()) - f0.get(d.rev())).max(0);
        let id = din.add_edge(u, v, cf, cb);
        arc_edges.push((a, id, cf));
    }
    let mut seen_src = vec![false; n];
    for &s in sources {
        if g.node_is_alive(s) && ok(s) && !seen_src[s] {
            seen_src[s] = true;
            din.add_edge(ss, s, big, 0);
        }
    }
    let mut seen_snk = vec![false; n];
    for &t in sinks {
        if g.node_is_alive(t) && ok(t) && !seen_snk[t] {
            seen_snk[t] = true;
            din.add_edge(t, tt, big, 0);
        }
    }
    let value = din.max_flow(ss, tt);
    let mut delta = Pseudoflow::zero(g);
    for &(a, id, cf) in &arc_edges {
        let fl = din.edge_flow(id, cf);
        if fl != 0 {
            delta.push(g, Dart::forward(a), fl);
        }
    }
    (value, delta)
}

/// Exact multi-source multi-sink max flow via blocking flows on the
/// super-source/super-sink reduction.
pub fn oracle_maxflow(
    g: &PlanarGraph,
    c: &Capacities,
    sources: &[NodeId],
    sinks: &[NodeId],
) -> (i64, Pseudoflow) {
    let f0 = Pseudoflow::zero(g);
    maxflow_on_residual(g, c, &f0, None, sources, sinks)
}

/// Slow Edmonds-Karp used as an independent second oracle in tests.
pub fn bfs_augmenting_maxflow(
    g: &PlanarGraph,
    c: &Capacities,
    sources: &[NodeId],
    sinks: &[NodeId],
) -> i64 {
    let mut f = Pseudoflow::zero(g);
    let mut is_sink = vec![false; g.node_capacity()];
    for &t in sinks {
        is_sink[t] = true;
    }
    let mut value = 0i64;
    loop {
        // BFS from all sources over positive residual darts
        let mut pred: Vec<Option<Dart>> = vec![None; g.node_capacity()];
        let mut seen = vec![false; g.node_capacity()];
        let mut q = std::collections::VecDeque::new();
        for &s in sources {
            if g.node_is_alive(s) && !seen[s] {
                seen[s] = true;
                q.push_back(s);
            }
        }
        let mut hit = None;
        'bfs: while let Some(u) = q.pop_front() {
            for d in g.darts_at(u) {
                if c.get(d) - f.get(d) > 0 {
                    let w = g.head(d);
                    if !seen[w] {
                        seen[w] = true;
                        pred[w] = Some(d);
                        if is_sink[w] {
                            hit = Some(w);
                            break 'bfs;
                        }
                        q.push_back(w);
                    }
                }
            }
        }
        let Some(t) = hit else { break };
        // bottleneck
        let mut bottleneck = i64::MAX;
        let mut v = t;
        while let Some(d) = pred[v] {
            bottleneck = bottleneck.min(c.get(d) - f.get(d));
            v = g.tail(d);
        }
        let mut v = t;
        while let Some(d) = pred[v] {
            f.push(g, d, bottleneck);
            v = g.tail(d);
        }
        value += bottleneck;
    }
    value
}
