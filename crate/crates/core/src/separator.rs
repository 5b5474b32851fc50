//! Simple cycle separators on triangulated 2-connected planar graphs.
//!
//! Fundamental-cycle approach: a BFS tree of the triangulation and its
//! interdigitating dual tree. Every non-tree edge closes a simple cycle
//! whose enclosed faces form a dual subtree; node weights are attributed
//! to a designated incident face so both side weights come from one
//! subtree sum plus an on-cycle correction. The best-balanced candidate
//! wins, ties broken by shorter cycle, then lower dart index.

use crate::planar::{Dart, FaceId, NodeId, PlanarGraph};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct WeightAssignment {
    pub weight: Vec<i64>,
}

impl WeightAssignment {
    pub fn uniform(g: &PlanarGraph) -> Self {
        let mut weight = vec![0; g.node_capacity()];
        for v in g.nodes() {
            weight[v] = 1;
        }
        WeightAssignment { weight }
    }

    pub fn on_nodes(g: &PlanarGraph, nodes: &[NodeId]) -> Self {
        let mut weight = vec![0; g.node_capacity()];
        for &v in nodes {
            weight[v] = 1;
        }
        WeightAssignment { weight }
    }

    pub fn total(&self) -> i64 {
        self.weight.iter().sum()
    }
}

/// Alternating weighting: even recursion depths balance the whole node
/// set, odd depths balance the auxiliary set (falling back to all nodes
/// when it has at most one member).
pub fn choose_weighting(level: usize, a_nodes: &[NodeId], g: &PlanarGraph) -> WeightAssignment {
    let live_a: Vec<NodeId> = a_nodes.iter().copied().filter(|&v| g.node_is_alive(v)).collect();
    if level % 2 == 0 || live_a.len() <= 1 {
        WeightAssignment::uniform(g)
    } else {
        WeightAssignment::on_nodes(g, &live_a)
    }
}

#[derive(Debug, Clone)]
pub struct CycleSeparator {
    /// Consecutive darts around the cycle; the last dart closes it.
    pub cycle: Vec<Dart>,
    pub cycle_nodes: Vec<NodeId>,
    /// The cycle minus the closing dart: a simple tree path.
    pub tree_path: Vec<Dart>,
    pub closing: Dart,
    pub inside: Vec<NodeId>,
    pub outside: Vec<NodeId>,
    pub inside_weight: i64,
    pub outside_weight: i64,
}

struct BfsTree {
    parent_dart: Vec<Option<Dart>>, // dart from parent into the node
    depth: Vec<u32>,
    is_tree_arc: Vec<bool>,
}

fn bfs_tree(g: &PlanarGraph, forbidden: &[bool]) -> Result<BfsTree> {
    let root = g
        .nodes()
        .find(|&v| !forbidden[v])
        .ok_or_else(|| Error::NoSeparator("every node forbidden".into()))?;
    let mut parent_dart = vec![None; g.node_capacity()];
    let mut depth = vec![0u32; g.node_capacity()];
    let mut seen = vec![false; g.node_capacity()];
    let mut is_tree_arc = vec![false; g.arc_capacity()];
    let mut q = std::collections::VecDeque::new();
    seen[root] = true;
    q.push_back(root);
    while let Some(u) = q.pop_front() {
        for d in g.darts_at(u) {
            let w = g.head(d);
            if !seen[w] {
                seen[w] = true;
                parent_dart[w] = Some(d);
                depth[w] = depth[u] + 1;
                is_tree_arc[d.arc()] = true;
                if !forbidden[w] {
                    // forbidden nodes join as leaves, never expanded
                    q.push_back(w);
                }
            }
        }
    }
    if g.nodes().any(|v| !seen[v]) {
        return Err(Error::NoSeparator(
            "forbidden nodes disconnect the graph; split terminals first".into(),
        ));
    }
    Ok(BfsTree { parent_dart, depth, is_tree_arc })
}

struct DualTree {
    /// Euler intervals per face for subtree membership tests.
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Designated-face weight summed over each subtree.
    subtree_weight: Vec<i64>,
    /// For each non-tree arc, the face on its child side.
    child_face: Vec<Option<FaceId>>,
}

fn dual_tree(g: &PlanarGraph, tree: &BfsTree, face_weight: &[i64]) -> DualTree {
    let fcount = g.face_count();
    // adjacency over non-tree arcs
    let mut adj: Vec<Vec<(FaceId, usize)>> = vec![Vec::new(); fcount];
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) || tree.is_tree_arc[a] {
            continue;
        }
        let (fl, fr) = (g.face_of(d), g.face_of(d.rev()));
        adj[fl].push((fr, a));
        adj[fr].push((fl, a));
    }
    let root = 0usize;
    let mut tin = vec![usize::MAX; fcount];
    let mut tout = vec![0usize; fcount];
    let mut subtree_weight = face_weight.to_vec();
    let mut child_face = vec![None; g.arc_capacity()];
    let mut clock = 0usize;
    // iterative DFS
    let mut stack: Vec<(FaceId, usize)> = vec![(root, 0)];
    clock += 1;
    tin[root] = clock;
    let mut parent_of = vec![usize::MAX; fcount];
    while let Some(&(f, idx)) = stack.last() {
        if idx < adj[f].len() {
            stack.last_mut().unwrap().1 += 1;
            let (nf, arc) = adj[f][idx];
            if tin[nf] == usize::MAX {
                clock += 1;
                tin[nf] = clock;
                parent_of[nf] = f;
                child_face[arc] = Some(nf);
                stack.push((nf, 0));
            }
        } else {
            tout[f] = clock;
            stack.pop();
            if parent_of[f] != usize::MAX {
                subtree_weight[parent_of[f]] += subtree_weight[f];
            }
        }
    }
    DualTree { tin, tout, subtree_weight, child_face }
}

#[inline]
fn in_subtree(dt: &DualTree, root: FaceId, f: FaceId) -> bool {
    dt.tin[root] <= dt.tin[f] && dt.tin[f] <= dt.tout[root]
}

/// Finds a simple cycle separator avoiding `forbidden`, with both open
/// sides of weight at most 2/3 of the total. Errors when the graph is
/// too small, no candidate is balanced, or the forbidden set blocks the
/// search.
pub fn simple_cycle_separator(
    g: &PlanarGraph,
    w: &WeightAssignment,
    forbidden: &[bool],
) -> Result<CycleSeparator> {
    if g.live_node_count() <= 3 {
        return Err(Error::NoSeparator("graph too small; use the base case".into()));
    }
    let total = w.total();
    if total <= 0 {
        return Err(Error::NoSeparator("zero total weight".into()));
    }
    let bound = (2 * total + 2) / 3; // ceil(2/3 total)
    let tree = bfs_tree(g, forbidden)?;
    // designated face per node: the face left of its lowest out-dart
    let mut desig = vec![usize::MAX; g.node_capacity()];
    let mut face_weight = vec![0i64; g.face_count()];
    for v in g.nodes() {
        let d = g
            .darts_at(v)
            .min_by_key(|d| d.0)
            .ok_or_else(|| Error::Malformed(format!("isolated node {v}")))?;
        desig[v] = g.face_of(d);
        face_weight[desig[v]] += w.weight[v];
    }
    let dt = dual_tree(g, &tree, &face_weight);

    let mut best: Option<(i64, usize, usize)> = None; // (max side, cycle len, arc)
    let mut cycle_buf: Vec<NodeId> = Vec::new();
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) || tree.is_tree_arc[a] {
            continue;
        }
        let (u, v) = (g.tail(d), g.head(d));
        if forbidden[u] || forbidden[v] {
            continue;
        }
        let Some(cf) = dt.child_face[a] else { continue };
        // walk the fundamental cycle, correcting for on-cycle weight
        cycle_buf.clear();
        let (mut x, mut y) = (u, v);
        while tree.depth[x] > tree.depth[y] {
            cycle_buf.push(x);
            x = g.tail(tree.parent_dart[x].unwrap());
        }
        while tree.depth[y] > tree.depth[x] {
            cycle_buf.push(y);
            y = g.tail(tree.parent_dart[y].unwrap());
        }
        while x != y {
            cycle_buf.push(x);
            cycle_buf.push(y);
            x = g.tail(tree.parent_dart[x].unwrap());
            y = g.tail(tree.parent_dart[y].unwrap());
        }
        cycle_buf.push(x); // the lca
        let len = cycle_buf.len();
        let mut cyc_weight = 0i64;
        let mut inside_correction = 0i64;
        for &n in &cycle_buf {
            cyc_weight += w.weight[n];
            if in_subtree(&dt, cf, desig[n]) {
                inside_correction += w.weight[n];
            }
        }
        let inside = dt.subtree_weight[cf] - inside_correction;
        let outside = total - inside - cyc_weight;
        let max_side = inside.max(outside);
        if max_side > bound {
            continue;
        }
        let key = (max_side, len, a);
        if best.map_or(true, |b| key < b) {
            best = Some(key);
        }
    }
    let Some((_, _, arc)) = best else {
        return Err(Error::NoSeparator("no balanced fundamental cycle".into()));
    };
    build_separator(g, w, &tree, &dt, desig.as_slice(), arc)
}

fn build_separator(
    g: &PlanarGraph,
    w: &WeightAssignment,
    tree: &BfsTree,
    dt: &DualTree,
    desig: &[FaceId],
    arc: usize,
) -> Result<CycleSeparator> {
    let d = Dart::forward(arc);
    let (u, v) = (g.tail(d), g.head(d));
    let cf = dt.child_face[arc].unwrap();
    // tree path u .. lca .. v
    let mut up_u: Vec<Dart> = Vec::new(); // darts u -> parent -> ...
    let mut up_v: Vec<Dart> = Vec::new();
    let (mut x, mut y) = (u, v);
    while tree.depth[x] > tree.depth[y] {
        let pd = tree.parent_dart[x].unwrap();
        up_u.push(pd.rev());
        x = g.tail(pd);
    }
    while tree.depth[y] > tree.depth[x] {
        let pd = tree.parent_dart[y].unwrap();
        up_v.push(pd.rev());
        y = g.tail(pd);
    }
    while x != y {
        let pdx = tree.parent_dart[x].unwrap();
        let pdy = tree.parent_dart[y].unwrap();
        up_u.push(pdx.rev());
        up_v.push(pdy.rev());
        x = g.tail(pdx);
        y = g.tail(pdy);
    }
    // tree path from u to v: up from u, then down to v
    let mut tree_path = up_u;
    for pd in up_v.into_iter().rev() {
        tree_path.push(pd.rev());
    }
    let closing = Dart::backward(arc); // v -> u
    let mut cycle = tree_path.clone();
    cycle.push(closing);
    let mut cycle_nodes = Vec::with_capacity(cycle.len());
    let mut on_cycle = vec![false; g.node_capacity()];
    for &cd in &cycle {
        let t = g.tail(cd);
        cycle_nodes.push(t);
        on_cycle[t] = true;
    }
    debug_assert_eq!(cycle_nodes.len(), cycle.len());
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut inside_weight = 0i64;
    let mut outside_weight = 0i64;
    for n in g.nodes() {
        if on_cycle[n] {
            continue;
        }
        if in_subtree(dt, cf, desig[n]) {
            inside.push(n);
            inside_weight += w.weight[n];
        } else {
            outside.push(n);
            outside_weight += w.weight[n];
        }
    }
    Ok(CycleSeparator {
        cycle,
        cycle_nodes,
        tree_path,
        closing,
        inside,
        outside,
        inside_weight,
        outside_weight,
    })
}
