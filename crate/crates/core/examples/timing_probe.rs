// quick phase-timing probe
use pmf_core::generate::{generate, Kind};
use pmf_core::planar::surgery::*;
use pmf_core::planar::*;
use pmf_core::separator::*;
use pmf_core::flow::Pseudoflow;
use std::time::Instant;

fn main() {
    let p = generate(Kind::Grid, 160000, 0, (0, 100));
    let mut g = p.graph.clone();
    let mut c = p.caps.clone();
    let mut log = SurgeryLog::new();
    let t0 = Instant::now();
    for &s in &p.sources { split_terminal(&mut g, &mut log, &mut c, s, TerminalKind::Source); }
    for &t in &p.sinks { split_terminal(&mut g, &mut log, &mut c, t, TerminalKind::Sink); }
    println!("split: {:?}", t0.elapsed());
    let t0 = Instant::now();
    triangulate_and_biconnect(&mut g, &mut log, &mut c).unwrap();
    println!("triangulate: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let w = choose_weighting(0, &[], &g);
    let forbidden = vec![false; g.node_capacity()];
    let sep = simple_cycle_separator(&g, &w, &forbidden).unwrap();
    println!("separator: {:?} (cycle len {})", t0.elapsed(), sep.cycle_nodes.len());
    // simulate the line-9 fix cost: an efficient fix over the tree path with a random pseudoflow
    let f0 = Pseudoflow::zero(&g);
    let t0 = Instant::now();
    let out = pmf_core::fix::fix_conservation_on_path(&g, &sep.tree_path, &c, &f0).unwrap();
    println!("fix (zero flow, skip-free): {:?}", t0.elapsed());
    let _ = out;
}
