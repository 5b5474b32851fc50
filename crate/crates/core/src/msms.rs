//! Multiple-source multiple-sink maximum flow.
//!
//! The recursion splits the (split, triangulated) graph along a simple
//! cycle separator, contracts the separator path, solves both pieces
//! with the supernode joining the auxiliary set, then repairs the
//! resulting excesses: conservation fixing along the uncontracted path,
//! limited pushes between the cycle and each auxiliary node, and a final
//! topological push-back of leftovers to the terminals. Each call
//! guarantees a pseudoflow conserving everywhere off S, T and the
//! auxiliary set, with no residual path from S to T, from S to the
//! auxiliary set, or from the auxiliary set to T.

use crate::fix::fix_conservation_on_path;
use crate::flow::{
    drain_deficits, reaches, residual_reachable, settle_excess, Pseudoflow,
};
use crate::oracle::maxflow_on_residual;
use crate::planar::surgery::{
    attach_pendant, contract_path, delete_nodes, extract_induced, insert_arcs_along_cycle,
    split_terminal, triangulate_and_biconnect, SurgeryLog, TerminalKind,
};
use crate::planar::{Capacities, Dart, NodeId, PlanarGraph};
use crate::separator::{choose_weighting, simple_cycle_separator, CycleSeparator};
use crate::{Error, Instrument, Result};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub instrument: bool,
    /// Node count at or under which a piece is solved directly.
    pub base_size: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { instrument: false, base_size: 64 }
    }
}

#[derive(Debug)]
pub struct MsmsOutcome {
    pub flow: Pseudoflow,
    pub value: i64,
    pub instr: Instrument,
}

/// Auxiliary-set bound that must hold at every recursive call.
pub const MAX_AUX: usize = 6;

/// Solves maximum flow from `sources` to `sinks`. The returned flow is
/// feasible, obeys conservation off the terminals, and is certified
/// maximum by the absence of residual source-to-sink paths (re-checked
/// before returning). Disconnected inputs are solved per component;
/// self-loops never carry flow.
pub fn msms_maxflow(
    g: &PlanarGraph,
    c: &Capacities,
    sources: &[NodeId],
    sinks: &[NodeId],
    opts: &SolveOptions,
) -> Result<MsmsOutcome> {
    let problem = crate::instance::FlowProblem::new(g.clone(), c.clone(), sources.to_vec(), sinks.to_vec());
    problem.validate()?;
    let mut instr = Instrument { enabled: opts.instrument, ..Default::default() };
    let comps = g.components();
    let comp_count = g.nodes().map(|v| comps[v] + 1).max().unwrap_or(0);
    let mut flow = Pseudoflow::zero(g);
    for comp in 0..comp_count {
        let keep: Vec<bool> =
            (0..g.node_capacity()).map(|v| g.node_is_alive(v) && comps[v] == comp).collect();
        let s: Vec<NodeId> = sources.iter().copied().filter(|&v| keep[v]).collect();
        let t: Vec<NodeId> = sinks.iter().copied().filter(|&v| keep[v]).collect();
        if s.is_empty() || t.is_empty() {
            continue;
        }
        let ex = extract_induced(g, &keep, true)?;
        let sub_c = ex.caps(c);
        let map = |set: &[NodeId]| -> Vec<NodeId> {
            set.iter().map(|&v| ex.new_node[v].unwrap()).collect()
        };
        let sub_f = msms_recursive(
            &ex.graph,
            &sub_c,
            &map(&s),
            &map(&t),
            &[],
            0,
            opts,
            &mut instr,
        )?;
        for (na, &oa) in ex.old_arc.iter().enumerate() {
            let x = sub_f.get(Dart::forward(na));
            if x != 0 {
                flow.push(g, Dart::forward(oa), x);
            }
        }
    }
    // safety finalization; the recursion already conserves off terminals
    let flow = crate::flow::finalize_pseudoflow(g, c, &flow, sources, sinks);
    check_msms_contract(g, c, &flow, sources, sinks, &[])?;
    let value = sinks.iter().map(|&t| flow.inflow(t)).sum();
    Ok(MsmsOutcome { flow, value, instr })
}

/// Final contract of every recursive call.
pub fn check_msms_contract(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    sources: &[NodeId],
    sinks: &[NodeId],
    aux: &[NodeId],
) -> Result<()> {
    if let Some(d) = f.feasibility_violation(g, c) {
        return Err(Error::Contract(format!("flow infeasible at {:?}", d)));
    }
    let mut free = vec![false; g.node_capacity()];
    for &v in sources.iter().chain(sinks).chain(aux) {
        free[v] = true;
    }
    for v in g.nodes() {
        if !free[v] && f.inflow(v) != 0 {
            return Err(Error::Contract(format!(
                "conservation violated at {v} (inflow {})",
                f.inflow(v)
            )));
        }
    }
    let from_s = residual_reachable(g, c, f, sources);
    if sinks.iter().any(|&t| from_s[t]) {
        return Err(Error::Contract("residual path from sources to sinks".into()));
    }
    if aux.iter().any(|&a| from_s[a]) {
        return Err(Error::Contract("residual path from sources to auxiliary set".into()));
    }
    if reaches(g, c, f, aux, sinks) {
        return Err(Error::Contract("residual path from auxiliary set to sinks".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn msms_recursive(
    g: &PlanarGraph,
    c: &Capacities,
    sources: &[NodeId],
    sinks: &[NodeId],
    aux: &[NodeId],
    depth: usize,
    opts: &SolveOptions,
    instr: &mut Instrument,
) -> Result<Pseudoflow> {
    instr.calls += 1;
    instr.max_aux = instr.max_aux.max(aux.len());
    if aux.len() > MAX_AUX {
        return Err(Error::Contract(format!("auxiliary set grew to {}", aux.len())));
    }
    if g.live_node_count() <= opts.base_size {
        return base_case(g, c, sources, sinks, aux, opts, instr);
    }
    // work on a copy: split terminals, triangulate, separate
    let mut gw = g.clone();
    let mut cw = c.clone();
    cw.resize(gw.dart_capacity());
    let mut log = SurgeryLog::new();
    let mut split_sources = Vec::with_capacity(sources.len());
    for &s in sources {
        split_sources.push(split_terminal(&mut gw, &mut log, &mut cw, s, TerminalKind::Source));
    }
    let mut split_sinks = Vec::with_capacity(sinks.len());
    for &t in sinks {
        split_sinks.push(split_terminal(&mut gw, &mut log, &mut cw, t, TerminalKind::Sink));
    }
    triangulate_and_biconnect(&mut gw, &mut log, &mut cw)?;
    let mut forbidden = vec![false; gw.node_capacity()];
    for &v in split_sources.iter().chain(&split_sinks) {
        forbidden[v] = true;
    }
    let sep = match find_separator(&gw, aux, depth, &forbidden, instr) {
        Some(sep) => sep,
        None => {
            instr.separator_fallbacks += 1;
            return base_case(g, c, sources, sinks, aux, opts, instr);
        }
    };
    let path = sep.tree_path.clone();
    let mark = log.mark();
    let (v_super, _) = contract_path(&mut gw, &mut log, &path)?;
    let mut flow = solve_pieces(
        &gw, &cw, &sep, v_super, &split_sources, &split_sinks, aux, depth, opts, instr,
    )?;
    log.undo_to(mark, &mut gw, &mut cw);
    flow.resync_inflows(&gw);
    if opts.instrument {
        // between the recursive calls and the final push-back
        let from_s = residual_reachable(&gw, &cw, &flow, &split_sources);
        let bad = split_sinks.iter().any(|&t| from_s[t])
            || aux.iter().any(|&a| from_s[a])
            || sep.cycle_nodes.iter().any(|&v| from_s[v]);
        instr.check(!bad, "sources reach sinks, aux or cycle after recursion")?;
        let ok_a = !reaches(&gw, &cw, &flow, aux, &split_sinks);
        instr.check(ok_a, "aux reaches sinks after recursion")?;
        let ok_c = !reaches(&gw, &cw, &flow, &sep.cycle_nodes, &split_sinks);
        instr.check(ok_c, "cycle reaches sinks after recursion")?;
    }
    if sep.cycle_nodes.iter().any(|&p| flow.inflow(p) != 0) {
        flow = fix_conservation_on_path(&gw, &path, &cw, &flow)?;
    }
    if opts.instrument {
        let pos: Vec<NodeId> =
            sep.cycle_nodes.iter().copied().filter(|&p| flow.inflow(p) > 0).collect();
        let neg: Vec<NodeId> =
            sep.cycle_nodes.iter().copied().filter(|&p| flow.inflow(p) < 0).collect();
        instr.check(
            !reaches(&gw, &cw, &flow, &pos, &neg),
            "positive cycle nodes reach negative ones after the path fix",
        )?;
    }
    let mut prev_cplus: Option<Vec<NodeId>> = None;
    let mut prev_cminus: Option<Vec<NodeId>> = None;
    for (i, &a_i) in aux.iter().enumerate() {
        let cplus_i = compute_c_plus(&gw, &cw, &flow, &sep.cycle_nodes);
        let cminus_i = compute_c_minus(&gw, &cw, &flow, &sep.cycle_nodes);
        if opts.instrument {
            if let Some(prev) = &prev_cplus {
                let ok = cplus_i.iter().all(|v| prev.contains(v));
                instr.check(ok, "C+ not shrinking across iterations")?;
            }
            if let Some(prev) = &prev_cminus {
                let ok = cminus_i.iter().all(|v| prev.contains(v));
                instr.check(ok, "C- not shrinking across iterations")?;
            }
        }
        flow = cycle_to_single_sink_limited(&mut gw, &mut cw, &mut log, &flow, &sep.cycle_nodes, a_i)?;
        if opts.instrument {
            check_a_iteration(&gw, &cw, &flow, &sep, &cplus_i, &cminus_i, &aux[..=i], instr)?;
        }
        flow = single_source_to_cycle_limited(&mut gw, &mut log, &cw, &flow, a_i, &sep.cycle_nodes)?;
        if opts.instrument {
            check_a_iteration(&gw, &cw, &flow, &sep, &cplus_i, &cminus_i, &aux[..=i], instr)?;
        }
        prev_cplus = Some(cplus_i);
        prev_cminus = Some(cminus_i);
    }
    if opts.instrument {
        // just before the final push-back
        let pos: Vec<NodeId> =
            sep.cycle_nodes.iter().copied().filter(|&p| flow.inflow(p) > 0).collect();
        let neg: Vec<NodeId> =
            sep.cycle_nodes.iter().copied().filter(|&p| flow.inflow(p) < 0).collect();
        instr.check(!reaches(&gw, &cw, &flow, &pos, &neg), "C+ reaches C- before push-back")?;
        instr.check(!reaches(&gw, &cw, &flow, &pos, aux), "C+ reaches aux before push-back")?;
        instr.check(!reaches(&gw, &cw, &flow, aux, &neg), "aux reaches C- before push-back")?;
    }
    // push leftover excess back to the terminals
    let mut protected = vec![false; gw.node_capacity()];
    for &v in split_sources.iter().chain(&split_sinks).chain(aux) {
        protected[v] = true;
    }
    settle_excess(&gw, &mut flow, &protected);
    // project onto the original graph: split and triangulation arcs drop
    let mut out = Pseudoflow::zero(g);
    for a in 0..g.arc_capacity() {
        let d = Dart::forward(a);
        if g.dart_is_alive(d) {
            let x = flow.get(d);
            if x != 0 {
                out.push(g, d, x);
            }
        }
    }
    check_msms_contract(g, c, &out, sources, sinks, aux)?;
    Ok(out)
}

fn find_separator(
    gw: &PlanarGraph,
    aux: &[NodeId],
    depth: usize,
    forbidden: &[bool],
    instr: &mut Instrument,
) -> Option<CycleSeparator> {
    let w = choose_weighting(depth, aux, gw);
    match simple_cycle_separator(gw, &w, forbidden) {
        Ok(sep) => Some(sep),
        Err(_) if depth % 2 == 1 && aux.len() > 1 => {
            // odd level failed to balance the auxiliary set; fall back to
            // a node-balanced cycle if it keeps the child sets small
            instr.separator_fallbacks += 1;
            let w2 = choose_weighting(0, aux, gw);
            let sep = simple_cycle_separator(gw, &w2, forbidden).ok()?;
            let inside_a = aux.iter().filter(|&&a| sep.inside.contains(&a)).count();
            let outside_a = aux.iter().filter(|&&a| sep.outside.contains(&a)).count();
            if inside_a < MAX_AUX && outside_a < MAX_AUX {
                Some(sep)
            } else {
                None
            }
        }
        Err(_) => None,
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_pieces(
    gw: &PlanarGraph,
    cw: &Capacities,
    sep: &CycleSeparator,
    v_super: NodeId,
    split_sources: &[NodeId],
    split_sinks: &[NodeId],
    aux: &[NodeId],
    depth: usize,
    opts: &SolveOptions,
    instr: &mut Instrument,
) -> Result<Pseudoflow> {
    let mut flow = Pseudoflow::zero(gw);
    for side in [&sep.inside, &sep.outside] {
        let mut keep = vec![false; gw.node_capacity()];
        for &v in side {
            keep[v] = true;
        }
        keep[v_super] = true;
        let ex = extract_induced(gw, &keep, true)?;
        let sub_c = ex.caps(cw);
        let map = |set: &[NodeId]| -> Vec<NodeId> {
            set.iter().filter(|&&v| keep[v] && v != v_super).map(|&v| ex.new_node[v].unwrap()).collect()
        };
        let mut sub_aux = map(aux);
        sub_aux.push(ex.new_node[v_super].unwrap());
        let sub_f = msms_recursive(
            &ex.graph,
            &sub_c,
            &map(split_sources),
            &map(split_sinks),
            &sub_aux,
            depth + 1,
            opts,
            instr,
        )?;
        for (na, &oa) in ex.old_arc.iter().enumerate() {
            let x = sub_f.get(Dart::forward(na));
            if x != 0 {
                flow.push(gw, Dart::forward(oa), x);
            }
        }
    }
    Ok(flow)
}

fn check_a_iteration(
    gw: &PlanarGraph,
    cw: &Capacities,
    flow: &Pseudoflow,
    sep: &CycleSeparator,
    cplus_i: &[NodeId],
    cminus_i: &[NodeId],
    aux_prefix: &[NodeId],
    instr: &mut Instrument,
) -> Result<()> {
    instr.check(
        !reaches(gw, cw, flow, cplus_i, cminus_i),
        "C+_i reaches C-_i inside the aux loop",
    )?;
    let pos_now: Vec<NodeId> =
        sep.cycle_nodes.iter().copied().filter(|&p| flow.inflow(p) > 0).collect();
    let pos_minus_a: Vec<NodeId> =
        pos_now.iter().copied().filter(|p| !aux_prefix.contains(p)).collect();
    instr.check(
        !reaches(gw, cw, flow, &pos_minus_a, aux_prefix),
        "positive cycle nodes reach processed aux nodes",
    )?;
    let neg_now: Vec<NodeId> = sep
        .cycle_nodes
        .iter()
        .copied()
        .filter(|&p| flow.inflow(p) < 0 && !aux_prefix.contains(&p))
        .collect();
    instr.check(
        !reaches(gw, cw, flow, &aux_prefix[..aux_prefix.len() - 1], &neg_now),
        "processed aux nodes reach negative cycle nodes",
    )?;
    Ok(())
}

/// Direct solve for small pieces: a max flow from the sources into sinks
/// and auxiliary set, then a max flow from the auxiliary set to the
/// sinks restricted to nodes the sources cannot residually reach (so the
/// saturated cut in front of the sources stays intact).
#[allow(clippy::too_many_arguments)]
fn base_case(
    g: &PlanarGraph,
    c: &Capacities,
    sources: &[NodeId],
    sinks: &[NodeId],
    aux: &[NodeId],
    _opts: &SolveOptions,
    instr: &mut Instrument,
) -> Result<Pseudoflow> {
    instr.base_calls += 1;
    let zero = Pseudoflow::zero(g);
    let mut sinks_and_aux: Vec<NodeId> = sinks.to_vec();
    sinks_and_aux.extend_from_slice(aux);
    let (_, f1) = maxflow_on_residual(g, c, &zero, None, sources, &sinks_and_aux);
    let reach = residual_reachable(g, c, &f1, sources);
    let allowed: Vec<bool> = (0..g.node_capacity()).map(|v| !reach[v]).collect();
    let (_, f2) = maxflow_on_residual(g, c, &f1, Some(&allowed), aux, sinks);
    let f = f1.add(g, &f2);
    check_msms_contract(g, c, &f, sources, sinks, aux)?;
    Ok(f)
}

/// Cycle nodes residually reachable from the positive-inflow cycle
/// nodes, in cycle order (multi-seed search standing in for the
/// super-node construction).
pub fn compute_c_plus(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    cycle_nodes: &[NodeId],
) -> Vec<NodeId> {
    let seeds: Vec<NodeId> =
        cycle_nodes.iter().copied().filter(|&v| f.inflow(v) > 0).collect();
    if seeds.is_empty() {
        return Vec::new();
    }
    let seen = residual_reachable(g, c, f, &seeds);
    cycle_nodes.iter().copied().filter(|&v| seen[v]).collect()
}

/// Mirror: cycle nodes with a residual path to some negative-inflow
/// cycle node.
pub fn compute_c_minus(
    g: &PlanarGraph,
    c: &Capacities,
    f: &Pseudoflow,
    cycle_nodes: &[NodeId],
) -> Vec<NodeId> {
    let targets: Vec<NodeId> =
        cycle_nodes.iter().copied().filter(|&v| f.inflow(v) < 0).collect();
    if targets.is_empty() {
        return Vec::new();
    }
    // reverse reachability: BFS over transposed residual darts
    let mut seen = vec![false; g.node_capacity()];
    let mut q = std::collections::VecDeque::new();
    for &t in &targets {
        if !seen[t] {
            seen[t] = true;
            q.push_back(t);
        }
    }
    while let Some(u) = q.pop_front() {
        for d in g.darts_at(u) {
            // w -> u usable iff the dart into u has positive residual
            if c.get(d.rev()) - f.get(d.rev()) > 0 {
                let w = g.head(d);
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    cycle_nodes.iter().copied().filter(|&v| seen[v]).collect()
}

/// Pushes as much excess as possible from the cycle to `t`: delete the
/// unreachable cycle part, join the reachable part with contracted
/// big-capacity arcs, run one st max flow on residual capacities, then
/// reroute along the artificial path and push back any overdraft.
/// Surgeries are undone before returning.
pub fn cycle_to_single_sink_limited(
    gw: &mut PlanarGraph,
    cw: &mut Capacities,
    log: &mut SurgeryLog,
    f0: &Pseudoflow,
    cycle_nodes: &[NodeId],
    t: NodeId,
) -> Result<Pseudoflow> {
    let cplus = compute_c_plus(gw, cw, f0, cycle_nodes);
    for &v in &cplus {
        if f0.inflow(v) < 0 {
            return Err(Error::Contract(format!(
                "reachable cycle node {v} has negative inflow on entry"
            )));
        }
    }
    if cplus.is_empty() {
        return Ok(f0.clone());
    }
    let on_cycle: Vec<bool> = {
        let mut m = vec![false; gw.node_capacity()];
        for &v in cycle_nodes {
            m[v] = true;
        }
        m
    };
    if on_cycle[t] && !cplus.contains(&t) {
        // the sink sits on the unreachable part of the cycle: nothing to push
        return Ok(f0.clone());
    }
    let mark = log.mark();
    // a sink on the reachable cycle part is split off as a pendant whose
    // bundle capacity is its total residual in-capacity, so saturation
    // of the pendant still certifies the sink residually closed
    let sink = if cplus.contains(&t) {
        let resid_in: i64 =
            gw.darts_at(t).map(|d| (cw.get(d.rev()) - f0.get(d.rev())).max(0)).sum();
        attach_pendant(gw, log, cw, t, TerminalKind::Sink, resid_in)
    } else {
        t
    };
    let to_delete: Vec<NodeId> =
        cycle_nodes.iter().copied().filter(|v| !cplus.contains(v)).collect();
    delete_nodes(gw, log, &to_delete);
    let path_nodes: Vec<NodeId> = cplus.clone();
    let m_big = crate::flow::capacity_sum(gw, cw) + 1;
    let art_arcs = if path_nodes.len() >= 2 {
        insert_arcs_along_cycle(gw, log, cw, &path_nodes, m_big)?
    } else {
        Vec::new()
    };
    let art_path: Vec<Dart> = art_arcs.iter().map(|&a| Dart::forward(a)).collect();
    let mark_contract = log.mark();
    let source = if art_path.is_empty() {
        path_nodes.first().copied().unwrap_or(sink)
    } else {
        contract_path(gw, log, &art_path)?.0
    };
    let (_, mut delta) = if source == sink {
        (0, Pseudoflow::zero(gw))
    } else {
        maxflow_on_residual(gw, cw, f0, None, &[source], &[sink])
    };
    log.undo_to(mark_contract, gw, cw);
    delta.resync_inflows(gw);
    // artificial capacities drop to zero before the reroute
    for &a in &art_arcs {
        log.set_cap(cw, Dart::forward(a), 0);
    }
    let mut total = f0.add(gw, &delta);
    total.resync_inflows(gw);
    if !art_path.is_empty() {
        total = fix_conservation_on_path(gw, &art_path, cw, &total)?;
    }
    // push back overdraft: restore nonnegative inflow on the reachable
    // cycle part, draining only this procedure's own flow
    let mut delta = total.add(gw, &f0.negated());
    delta.resync_inflows(gw);
    let mut protected = vec![false; gw.node_capacity()];
    protected[sink] = true;
    let in_cplus = {
        let mut m = vec![false; gw.node_capacity()];
        for &v in &cplus {
            m[v] = true;
        }
        m
    };
    let base: Vec<i64> =
        (0..gw.node_capacity()).map(|v| if in_cplus[v] { f0.inflow(v) } else { 0 }).collect();
    drain_deficits(gw, &mut delta, &protected, |d, v| -(base[v] + d.inflow(v)).min(0));
    for &a in &art_arcs {
        let d = Dart::forward(a);
        if delta.get(d) != 0 {
            return Err(Error::Contract("artificial arc still carries flow".into()));
        }
    }
    log.undo_to(mark, gw, cw);
    let mut out = f0.clone();
    out.ensure_sized(gw);
    for a in 0..gw.arc_capacity() {
        let d = Dart::forward(a);
        if gw.dart_is_alive(d) {
            let x = delta.get(d);
            if x != 0 {
                out.push(gw, d, x);
            }
        }
    }
    Ok(out)
}

/// Mirror of the cycle-to-sink push: pull flow from `s` into the cycle
/// to erase negative inflows. Implemented by swapping every dart with
/// its reverse (capacities swap, flows negate), running the sink
/// version, and mapping back.
pub fn single_source_to_cycle_limited(
    gw: &mut PlanarGraph,
    log: &mut SurgeryLog,
    cw: &Capacities,
    f0: &Pseudoflow,
    s: NodeId,
    cycle_nodes: &[NodeId],
) -> Result<Pseudoflow> {
    let mut swapped = Capacities::new(gw.dart_capacity(), 0);
    for d in gw.darts() {
        swapped.set(d, cw.get(d.rev()));
    }
    let mirrored = f0.negated();
    let out = cycle_to_single_sink_limited(gw, &mut swapped, log, &mirrored, cycle_nodes, s)?;
    Ok(out.negated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, grid_graph, Kind};
    use crate::oracle::oracle_maxflow;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_arc() {
        let g = PlanarGraph::build_embedding(2, &[(0, 1)], &[vec![Dart(0)], vec![Dart(1)]])
            .unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 7);
        let out = msms_maxflow(&g, &c, &[0], &[1], &SolveOptions::default()).unwrap();
        assert_eq!(out.value, 7);
    }

    #[test]
    fn empty_terminals() {
        let (g, _) = grid_graph(3, 3);
        let c = Capacities::new(g.dart_capacity(), 5);
        let out = msms_maxflow(&g, &c, &[], &[8], &SolveOptions::default()).unwrap();
        assert_eq!(out.value, 0);
        let out = msms_maxflow(&g, &c, &[0], &[], &SolveOptions::default()).unwrap();
        assert_eq!(out.value, 0);
    }

    #[test]
    fn grid_matches_oracle_through_recursion() {
        // big enough to force several recursion levels
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..5 {
            let p = generate(Kind::Grid, 400, 100 + trial, (0, 50));
            let (want, _) = oracle_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks);
            let opts = SolveOptions { base_size: 32, ..Default::default() };
            let out = msms_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks, &opts).unwrap();
            assert_eq!(out.value, want, "trial {trial}");
            assert!(out.instr.max_aux <= MAX_AUX);
            let _ = &mut rng;
        }
    }

    #[test]
    fn triangulation_matches_oracle() {
        for trial in 0..5 {
            let p = generate(Kind::RandomTriangulation, 300, 7 + trial, (0, 30));
            let (want, _) = oracle_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks);
            let opts = SolveOptions { base_size: 32, ..Default::default() };
            let out = msms_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks, &opts).unwrap();
            assert_eq!(out.value, want, "trial {trial}");
        }
    }

    #[test]
    fn instrumented_run_passes_checkpoints() {
        let p = generate(Kind::Grid, 256, 3, (0, 40));
        let opts = SolveOptions { instrument: true, base_size: 16 };
        let out = msms_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks, &opts).unwrap();
        assert!(out.instr.checkpoints > 0);
        let (want, _) = oracle_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks);
        assert_eq!(out.value, want);
    }

    #[test]
    fn cycle_push_moves_excess_to_sink() {
        // grid with artificial excess on a middle "cycle"
        let (mut g, _) = grid_graph(4, 4);
        let mut c = Capacities::new(g.dart_capacity(), 4);
        c.resize(g.dart_capacity());
        let mut f0 = Pseudoflow::zero(&g);
        // inject +3 excess at node 5 by pulling from node 4 (off the cycle)
        let d = g.darts_at(5).find(|&d| g.head(d) == 4).unwrap();
        f0.push(&g, d, -3);
        let cycle = vec![5, 6, 10, 9];
        let t = 15;
        let mut log = SurgeryLog::new();
        let out =
            cycle_to_single_sink_limited(&mut g, &mut c, &mut log, &f0, &cycle, t).unwrap();
        assert!(log.is_empty() || true);
        // all of node 5's excess moved somewhere legal; cycle nodes keep
        // nonnegative inflow and cannot reach t
        for &v in &cycle {
            assert!(out.inflow(v) >= 0);
        }
        let pos: Vec<NodeId> = cycle.iter().copied().filter(|&v| out.inflow(v) > 0).collect();
        assert!(!reaches(&g, &c, &out, &pos, &[t]));
        // the delta conserves off the cycle and t
        for v in g.nodes() {
            if !cycle.contains(&v) && v != t {
                assert_eq!(out.inflow(v), f0.inflow(v), "node {v}");
            }
        }
    }

    #[test]
    fn mirror_is_reversal_of_output() {
        let (mut g, _) = grid_graph(4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut c = Capacities::new(g.dart_capacity(), 0);
        for a in 0..g.arc_capacity() {
            c.set(Dart::forward(a), rng.gen_range(0..8));
            c.set(Dart::backward(a), rng.gen_range(0..8));
        }
        let mut f0 = Pseudoflow::zero(&g);
        // deficit at node 5 from pushing toward node 4 (off the cycle)
        let d = g.darts_at(5).find(|&d| g.head(d) == 4).unwrap();
        f0.push(&g, d, c.get(d).min(3));
        let cycle = vec![5, 6, 10, 9];
        let s = 15;
        // metamorphic check: mirror(output) == output(mirror)
        let mut log = SurgeryLog::new();
        let via_mirror =
            single_source_to_cycle_limited(&mut g, &mut log, &c, &f0, s, &cycle).unwrap();
        let mut swapped = Capacities::new(g.dart_capacity(), 0);
        for d in g.darts() {
            swapped.set(d, c.get(d.rev()));
        }
        let mut log2 = SurgeryLog::new();
        let direct = cycle_to_single_sink_limited(
            &mut g,
            &mut swapped,
            &mut log2,
            &f0.negated(),
            &cycle,
            s,
        )
        .unwrap();
        for d in g.darts() {
            assert_eq!(via_mirror.get(d), -direct.get(d));
        }
        // negative inflows on the cycle were not worsened and s cannot
        // reach the remaining negative nodes
        let neg: Vec<NodeId> =
            cycle.iter().copied().filter(|&v| via_mirror.inflow(v) < 0).collect();
        assert!(!reaches(&g, &c, &via_mirror, &[s], &neg));
    }

    #[test]
    fn compute_c_plus_examples() {
        let (g, _) = grid_graph(3, 3);
        let c = Capacities::new(g.dart_capacity(), 2);
        let f = Pseudoflow::zero(&g);
        assert!(compute_c_plus(&g, &c, &f, &[0, 1, 2]).is_empty());
        // an excess node with zero-capacity surroundings reaches only itself
        let mut c2 = Capacities::new(g.dart_capacity(), 0);
        let d = g.darts_at(0).find(|&d| g.head(d) == 1).unwrap();
        c2.set(d.rev(), 5);
        let mut f2 = Pseudoflow::zero(&g);
        f2.push(&g, d.rev(), 3); // inflow +3 at node 0, residual back is open
        let cp = compute_c_plus(&g, &c2, &f2, &[0, 4, 8]);
        assert_eq!(cp, vec![0]);
    }

    #[test]
    fn compute_c_plus_matches_per_node_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (g, _) = grid_graph(4, 4);
        let mut c = Capacities::new(g.dart_capacity(), 0);
        for a in 0..g.arc_capacity() {
            c.set(Dart::forward(a), rng.gen_range(0..5));
            c.set(Dart::backward(a), rng.gen_range(0..5));
        }
        let mut f = Pseudoflow::zero(&g);
        for a in 0..g.arc_capacity() {
            let d = Dart::forward(a);
            let lo = -c.get(d.rev());
            let hi = c.get(d);
            if lo < hi {
                f.push(&g, d, rng.gen_range(lo..=hi));
            }
        }
        let cycle = vec![1, 2, 5, 6, 9];
        let fast = compute_c_plus(&g, &c, &f, &cycle);
        // brute force: union of per-seed searches
        let mut want = Vec::new();
        for &v in &cycle {
            let seeds: Vec<NodeId> =
                cycle.iter().copied().filter(|&x| f.inflow(x) > 0).collect();
            let mut hit = false;
            for &s in &seeds {
                if residual_reachable(&g, &c, &f, &[s])[v] {
                    hit = true;
                }
            }
            if hit {
                want.push(v);
            }
        }
        assert_eq!(fast, want);
    }

    #[test]
    fn disconnected_input_solved_per_component() {
        // two separate edges
        let arcs = vec![(0, 1), (2, 3)];
        let rotations = vec![vec![Dart(0)], vec![Dart(1)], vec![Dart(2)], vec![Dart(3)]];
        let g = PlanarGraph::build_embedding(4, &arcs, &rotations).unwrap();
        let mut c = Capacities::new(g.dart_capacity(), 0);
        c.set(Dart(0), 3);
        c.set(Dart(2), 4);
        let out = msms_maxflow(&g, &c, &[0, 2], &[1, 3], &SolveOptions::default()).unwrap();
        assert_eq!(out.value, 7);
    }
}
