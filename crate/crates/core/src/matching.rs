//! Maximum matching in planar bipartite graphs via the flow reduction:
//! pendant unit-capacity terminals on both sides, one multi-terminal max
//! flow, matching read off the saturated arcs.

use crate::msms::{msms_maxflow, SolveOptions};
use crate::planar::surgery::{split_terminal, SurgeryLog, TerminalKind};
use crate::planar::{Capacities, Dart, NodeId, PlanarGraph};
use crate::{Error, Result};

/// Maximum matching of a planar bipartite graph with the given sides.
/// Returns the matched arcs (each joining a left node to a right node).
pub fn planar_bipartite_matching(
    g: &PlanarGraph,
    left: &[NodeId],
    right: &[NodeId],
) -> Result<Vec<usize>> {
    let mut side = vec![0u8; g.node_capacity()];
    for &v in left {
        side[v] = 1;
    }
    for &v in right {
        if side[v] == 1 {
            return Err(Error::Input(format!("node {v} on both sides")));
        }
        side[v] = 2;
    }
    for d in g.darts() {
        if side[g.tail(d)] == side[g.head(d)] {
            return Err(Error::Input(format!(
                "edge {:?} joins nodes of the same side; graph not bipartite",
                d
            )));
        }
    }
    // unit capacities left-to-right only
    let mut gw = g.clone();
    let mut caps = Capacities::new(gw.dart_capacity(), 0);
    for d in g.darts() {
        if side[g.tail(d)] == 1 {
            caps.set(d, 1);
        }
    }
    // pendant unit terminals bound each node's throughput to one
    let mut log = SurgeryLog::new();
    let mut sources = Vec::new();
    for &u in left {
        if gw.first_dart(u).is_some() {
            let p = split_terminal(&mut gw, &mut log, &mut caps, u, TerminalKind::Source);
            let d = gw.first_dart(p).unwrap();
            log.set_cap(&mut caps, d, 1);
            sources.push(p);
        }
    }
    let mut sinks = Vec::new();
    for &v in right {
        if gw.first_dart(v).is_some() {
            let p = split_terminal(&mut gw, &mut log, &mut caps, v, TerminalKind::Sink);
            let d = gw.first_dart(p).unwrap();
            log.set_cap(&mut caps, d.rev(), 1);
            sinks.push(p);
        }
    }
    let out = msms_maxflow(&gw, &caps, &sources, &sinks, &SolveOptions::default())?;
    let mut matched = Vec::new();
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if !g.dart_is_alive(d) {
            continue;
        }
        let x = out.flow.get(d);
        debug_assert!(x.abs() <= 1);
        if x != 0 {
            matched.push(a);
        }
    }
    // sanity: the matching is a matching
    let mut used = vec![false; g.node_capacity()];
    for &a in &matched {
        let d = Dart::forward(a);
        for v in [g.tail(d), g.head(d)] {
            if used[v] {
                return Err(Error::Contract(format!("node {v} matched twice")));
            }
            used[v] = true;
        }
    }
    debug_assert_eq!(matched.len() as i64, out.value);
    Ok(matched)
}

/// Independent augmenting-path matching oracle (Kuhn's algorithm).
pub fn matching_oracle(g: &PlanarGraph, left: &[NodeId], right: &[NodeId]) -> usize {
    let mut right_index = vec![usize::MAX; g.node_capacity()];
    for (i, &v) in right.iter().enumerate() {
        right_index[v] = i;
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&u| {
            g.darts_at(u)
                .map(|d| g.head(d))
                .filter(|&w| right_index[w] != usize::MAX)
                .map(|w| right_index[w])
                .collect()
        })
        .collect();
    let mut match_right = vec![usize::MAX; right.len()];
    let mut size = 0;
    for u in 0..left.len() {
        let mut visited = vec![false; right.len()];
        if kuhn(u, &adj, &mut match_right, &mut visited) {
            size += 1;
        }
    }
    size
}

fn kuhn(u: usize, adj: &[Vec<usize>], match_right: &mut [usize], visited: &mut [bool]) -> bool {
    for &w in &adj[u] {
        if !visited[w] {
            visited[w] = true;
            if match_right[w] == usize::MAX
                || kuhn(match_right[w], adj, match_right, visited)
            {
                match_right[w] = u;
                return true;
            }
        }
    }
    false
}
