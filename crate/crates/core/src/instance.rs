//! Problem instances, the PMFv1 text format, solutions and the
//! verifier.
//!
//! Format, one record per line:
//! ```text
//! PMFv1
//! <nodes> <arcs>
//! <node rotations: signed 1-based arc refs, + outgoing, - incoming>
//! ...
//! <arc lines: tail head cap_fwd cap_bwd>
//! ...
//! S <count> <ids...>
//! T <count> <ids...>
//! ```
//! Writing a parsed instance reproduces the input bytes exactly.

use crate::flow::{residual_reachable, Pseudoflow};
use crate::planar::{Capacities, Dart, NodeId, PlanarGraph};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub graph: PlanarGraph,
    pub caps: Capacities,
    pub sources: Vec<NodeId>,
    pub sinks: Vec<NodeId>,
}

/// Capacity-sum guard: leaves headroom for big-M augmented values.
pub const CAP_SUM_LIMIT: i64 = 1 << 61;

impl FlowProblem {
    pub fn new(
        graph: PlanarGraph,
        caps: Capacities,
        sources: Vec<NodeId>,
        sinks: Vec<NodeId>,
    ) -> FlowProblem {
        FlowProblem { graph, caps, sources, sinks }
    }

    pub fn validate(&self) -> Result<()> {
        let mut sum: i64 = 0;
        for d in self.graph.darts() {
            let c = self.caps.get(d);
            if c < 0 {
                return Err(Error::Input(format!("negative capacity on {:?}", d)));
            }
            sum = sum
                .checked_add(c)
                .ok_or_else(|| Error::Input("capacity sum overflows".into()))?;
        }
        if sum >= CAP_SUM_LIMIT {
            return Err(Error::Input(format!(
                "capacity sum {sum} too large; overflow risk"
            )));
        }
        let mut is_source = vec![false; self.graph.node_capacity()];
        for &s in &self.sources {
            if s >= self.graph.node_capacity() || !self.graph.node_is_alive(s) {
                return Err(Error::Input(format!("source {s} out of range")));
            }
            is_source[s] = true;
        }
        for &t in &self.sinks {
            if t >= self.graph.node_capacity() || !self.graph.node_is_alive(t) {
                return Err(Error::Input(format!("sink {t} out of range")));
            }
            if is_source[t] {
                return Err(Error::Input(format!("node {t} is both source and sink")));
            }
        }
        Ok(())
    }

    pub fn write_text(&self) -> String {
        let g = &self.graph;
        let mut out = String::from("PMFv1\n");
        out.push_str(&format!("{} {}\n", g.node_capacity(), g.arc_capacity()));
        for v in 0..g.node_capacity() {
            let mut refs = Vec::new();
            if g.node_is_alive(v) {
                for d in g.darts_at(v) {
                    let r = d.arc() as i64 + 1;
                    refs.push(if d.is_forward() { r } else { -r }.to_string());
                }
            }
            out.push_str(&refs.join(" "));
            out.push('\n');
        }
        for a in 0..g.arc_capacity() {
            let d = Dart::forward(a);
            out.push_str(&format!(
                "{} {} {} {}\n",
                g.tail(d),
                g.head(d),
                self.caps.get(d),
                self.caps.get(d.rev())
            ));
        }
        let fmt_set = |name: &str, set: &[NodeId]| {
            let mut line = format!("{name} {}", set.len());
            for &v in set {
                line.push_str(&format!(" {v}"));
            }
            line.push('\n');
            line
        };
        out.push_str(&fmt_set("S", &self.sources));
        out.push_str(&fmt_set("T", &self.sinks));
        out
    }

    pub fn parse_text(text: &str) -> Result<FlowProblem> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
        if header != "PMFv1" {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let counts = lines.next().ok_or_else(|| Error::Parse("missing counts".into()))?;
        let mut it = counts.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse("bad node count".into()))?;
        let m: usize = it
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse("bad arc count".into()))?;
        let mut rotations = Vec::with_capacity(n);
        for v in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing rotation for node {v}")))?;
            let mut rot = Vec::new();
            for tok in line.split_whitespace() {
                let r: i64 =
                    tok.parse().map_err(|_| Error::Parse(format!("bad arc ref {tok:?}")))?;
                if r == 0 || r.unsigned_abs() as usize > m {
                    return Err(Error::Parse(format!("arc ref {r} out of range")));
                }
                let a = (r.unsigned_abs() - 1) as usize;
                rot.push(if r > 0 { Dart::forward(a) } else { Dart::backward(a) });
            }
            rotations.push(rot);
        }
        let mut arcs = Vec::with_capacity(m);
        let mut caps_raw = Vec::with_capacity(m);
        for a in 0..m {
            let line =
                lines.next().ok_or_else(|| Error::Parse(format!("missing arc {a}")))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("arc line {a} needs 4 fields")));
            }
            let tail: usize =
                parts[0].parse().map_err(|_| Error::Parse("bad tail".into()))?;
            let head: usize =
                parts[1].parse().map_err(|_| Error::Parse("bad head".into()))?;
            let cf: i64 = parts[2].parse().map_err(|_| Error::Parse("bad cap".into()))?;
            let cb: i64 = parts[3].parse().map_err(|_| Error::Parse("bad cap".into()))?;
            arcs.push((tail, head));
            caps_raw.push((cf, cb));
        }
        let parse_set = |line: Option<&str>, name: &str| -> Result<Vec<NodeId>> {
            let line = line.ok_or_else(|| Error::Parse(format!("missing {name} line")))?;
            let mut it = line.split_whitespace();
            if it.next() != Some(name) {
                return Err(Error::Parse(format!("expected {name} line")));
            }
            let k: usize = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad {name} count")))?;
            let ids: Vec<NodeId> = it
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad {name} id"))))
                .collect::<Result<_>>()?;
            if ids.len() != k {
                return Err(Error::Parse(format!("{name} count mismatch")));
            }
            Ok(ids)
        };
        let sources = parse_set(lines.next(), "S")?;
        let sinks = parse_set(lines.next(), "T")?;
        let graph = PlanarGraph::build_embedding(n, &arcs, &rotations)?;
        let mut caps = Capacities::new(graph.dart_capacity(), 0);
        for (a, &(cf, cb)) in caps_raw.iter().enumerate() {
            caps.set(Dart::forward(a), cf);
            caps.set(Dart::backward(a), cb);
        }
        let p = FlowProblem { graph, caps, sources, sinks };
        p.validate()?;
        Ok(p)
    }

    /// Expands a per-arc net flow into a dart pseudoflow.
    pub fn expand_flow(&self, arc_flow: &[i64]) -> Pseudoflow {
        let mut f = Pseudoflow::zero(&self.graph);
        for (a, &x) in arc_flow.iter().enumerate() {
            if x != 0 {
                f.push(&self.graph, Dart::forward(a), x);
            }
        }
        f
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSolution {
    pub value: i64,
    /// Net flow per arc, forward orientation.
    pub arc_flow: Vec<i64>,
    /// Saturated darts crossing the residual frontier of the sources.
    pub min_cut: Vec<usize>,
}

impl FlowSolution {
    /// Builds the solution record from a finished flow: value as the sum
    /// of sink inflows, the cut as the saturated residual frontier.
    pub fn from_flow(p: &FlowProblem, f: &Pseudoflow) -> FlowSolution {
        let g = &p.graph;
        let value = p.sinks.iter().map(|&t| f.inflow(t)).sum();
        let seen = residual_reachable(g, &p.caps, f, &p.sources);
        let mut min_cut = Vec::new();
        for d in g.darts() {
            if seen[g.tail(d)] && !seen[g.head(d)] && p.caps.get(d) > 0 {
                min_cut.push(d.0);
            }
        }
        let arc_flow = (0..g.arc_capacity()).map(|a| f.get(Dart::forward(a))).collect();
        FlowSolution { value, arc_flow, min_cut }
    }

    pub fn write_text(&self) -> String {
        let mut out = format!("value {}\n", self.value);
        out.push_str(&format!(
            "flows {}\n",
            self.arc_flow.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        ));
        out.push_str(&format!(
            "cut {}\n",
            self.min_cut.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        ));
        out
    }

    pub fn parse_text(text: &str) -> Result<FlowSolution> {
        let mut value = None;
        let mut arc_flow = Vec::new();
        let mut min_cut = Vec::new();
        for line in text.lines() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("value") => {
                    value = Some(
                        it.next()
                            .and_then(|x| x.parse().ok())
                            .ok_or_else(|| Error::Parse("bad value".into()))?,
                    )
                }
                Some("flows") => {
                    arc_flow = it
                        .map(|x| x.parse().map_err(|_| Error::Parse("bad flow".into())))
                        .collect::<Result<_>>()?
                }
                Some("cut") => {
                    min_cut = it
                        .map(|x| x.parse().map_err(|_| Error::Parse("bad cut dart".into())))
                        .collect::<Result<_>>()?
                }
                _ => {}
            }
        }
        Ok(FlowSolution {
            value: value.ok_or_else(|| Error::Parse("missing value".into()))?,
            arc_flow,
            min_cut,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub items: Vec<CheckItem>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.items.push(CheckItem { name: name.to_string(), ok, detail });
    }
}

/// Checks a solution against its instance: feasibility, conservation off
/// terminals, value consistency, residual separation of sources from
/// sinks, and that the reported cut is saturated, separating and equal
/// in capacity to the value.
pub fn verify(p: &FlowProblem, sol: &FlowSolution) -> VerifyReport {
    let g = &p.graph;
    let mut rep = VerifyReport { items: Vec::new() };
    if sol.arc_flow.len() != g.arc_capacity() {
        rep.push(
            "shape",
            false,
            format!("{} arc flows for {} arcs", sol.arc_flow.len(), g.arc_capacity()),
        );
        return rep;
    }
    let f = p.expand_flow(&sol.arc_flow);
    match f.feasibility_violation(g, &p.caps) {
        None => rep.push("feasible", true, "all darts within capacity".into()),
        Some(d) => rep.push(
            "feasible",
            false,
            format!("dart {:?} carries {} over capacity {}", d, f.get(d), p.caps.get(d)),
        ),
    }
    let mut terminal = vec![false; g.node_capacity()];
    for &v in p.sources.iter().chain(&p.sinks) {
        terminal[v] = true;
    }
    let bad: Vec<NodeId> =
        g.nodes().filter(|&v| !terminal[v] && f.inflow(v) != 0).collect();
    rep.push(
        "conservation",
        bad.is_empty(),
        if bad.is_empty() {
            "holds off terminals".into()
        } else {
            format!("violated at {bad:?}")
        },
    );
    let sink_sum: i64 = p.sinks.iter().map(|&t| f.inflow(t)).sum();
    rep.push(
        "value",
        sink_sum == sol.value,
        format!("claimed {} sink inflow {}", sol.value, sink_sum),
    );
    let seen = residual_reachable(g, &p.caps, &f, &p.sources);
    let leaking: Vec<NodeId> = p.sinks.iter().copied().filter(|&t| seen[t]).collect();
    rep.push(
        "residual-separated",
        leaking.is_empty(),
        if leaking.is_empty() {
            "no residual source-to-sink path".into()
        } else {
            format!("sinks {leaking:?} residually reachable")
        },
    );
    // cut checks
    let mut cut_ok = true;
    let mut cut_detail = String::new();
    let mut cut_cap: i64 = 0;
    let mut in_cut = vec![false; g.dart_capacity()];
    for &di in &sol.min_cut {
        let d = Dart(di);
        if !g.dart_is_alive(d) {
            cut_ok = false;
            cut_detail = format!("dart d{di} dead");
            break;
        }
        in_cut[di] = true;
        cut_cap += p.caps.get(d);
        if f.get(d) != p.caps.get(d) {
            cut_ok = false;
            cut_detail = format!("cut dart d{di} not saturated");
            break;
        }
    }
    if cut_ok {
        // the cut must block every positive-capacity source-to-sink path
        let mut seen2 = vec![false; g.node_capacity()];
        let mut q = std::collections::VecDeque::new();
        for &s in &p.sources {
            if !seen2[s] {
                seen2[s] = true;
                q.push_back(s);
            }
        }
        while let Some(u) = q.pop_front() {
            for d in g.darts_at(u) {
                if p.caps.get(d) > 0 && !in_cut[d.0] && !seen2[g.head(d)] {
                    seen2[g.head(d)] = true;
                    q.push_back(g.head(d));
                }
            }
        }
        if p.sinks.iter().any(|&t| seen2[t]) {
            cut_ok = false;
            cut_detail = "cut does not separate".into();
        } else if cut_cap != sol.value {
            cut_ok = false;
            cut_detail = format!("cut capacity {cut_cap} != value {}", sol.value);
        } else {
            cut_detail = format!("cut of capacity {cut_cap} separates");
        }
    }
    rep.push("min-cut", cut_ok, cut_detail);
    rep
}

/// Machine-readable run report.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub m: usize,
    pub value: i64,
    pub time_ms: f64,
    pub checks: serde_json::Value,
}
