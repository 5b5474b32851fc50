use pmf_core::generate::{generate, Kind};
use pmf_core::planar::surgery::*;
use pmf_core::separator::*;
use std::time::Instant;

fn main() {
    let p = generate(Kind::Grid, 160000, 0, (0, 100));
    let mut g = p.graph.clone();
    let mut c = p.caps.clone();
    let mut log = SurgeryLog::new();
    for &s in &p.sources { split_terminal(&mut g, &mut log, &mut c, s, TerminalKind::Source); }
    for &t in &p.sinks { split_terminal(&mut g, &mut log, &mut c, t, TerminalKind::Sink); }
    triangulate_and_biconnect(&mut g, &mut log, &mut c).unwrap();
    let w = choose_weighting(0, &[], &g);
    let forbidden = vec![false; g.node_capacity()];
    let sep = simple_cycle_separator(&g, &w, &forbidden).unwrap();
    // contract and extract the inside piece, then try to separate it
    let (vs, _) = contract_path(&mut g, &mut log, &sep.tree_path).unwrap();
    let mut keep = vec![false; g.node_capacity()];
    for &v in &sep.inside { keep[v] = true; }
    keep[vs] = true;
    let ex = extract_induced(&g, &keep, true).unwrap();
    let mut c2 = ex.caps(&c);
    let vs2 = ex.new_node[vs].unwrap();
    let mut g2 = ex.graph;
    println!("piece: {} nodes {} edges", g2.live_node_count(), g2.live_edge_count());
    let mut log2 = SurgeryLog::new();
    let t = Instant::now();
    triangulate_and_biconnect(&mut g2, &mut log2, &mut c2).unwrap();
    println!("piece triangulated in {:?}: {} nodes", t.elapsed(), g2.live_node_count());
    let w2 = choose_weighting(1, &[vs2], &g2);
    let forbidden2 = vec![false; g2.node_capacity()];
    let t = Instant::now();
    match simple_cycle_separator(&g2, &w2, &forbidden2) {
        Ok(s2) => println!("piece separator ok in {:?}: cycle {}, in {} out {}", t.elapsed(), s2.cycle_nodes.len(), s2.inside.len(), s2.outside.len()),
        Err(e) => println!("piece separator FAILED in {:?}: {}", t.elapsed(), e),
    }
    // now replicate the child call exactly: fresh piece, split terminals, triangulate, forbid
    let mut keep = vec![false; g.node_capacity()];
    for &v in &sep.inside { keep[v] = true; }
    keep[vs] = true;
    let ex = extract_induced(&g, &keep, true).unwrap();
    let mut c3 = ex.caps(&c);
    let vs3 = ex.new_node[vs].unwrap();
    let s3: Vec<usize> = p.sources.iter().chain(&p.sinks).filter_map(|&v| { let m: Option<usize> = if v < ex.new_node.len() { ex.new_node[v] } else { None }; m }).collect();
    let mut g3 = ex.graph;
    let mut log3 = SurgeryLog::new();
    let mut pend = Vec::new();
    for &t in &s3 { pend.push(split_terminal(&mut g3, &mut log3, &mut c3, t, TerminalKind::Sink)); }
    triangulate_and_biconnect(&mut g3, &mut log3, &mut c3).unwrap();
    let mut forb = vec![false; g3.node_capacity()];
    for &v in &pend { forb[v] = true; }
    forb[vs3] = true; // aux nodes are forbidden too
    let w3 = choose_weighting(1, &[vs3], &g3);
    let t = Instant::now();
    match simple_cycle_separator(&g3, &w3, &forb) {
        Ok(s2) => println!("child-replica separator ok in {:?}: cycle {}", t.elapsed(), s2.cycle_nodes.len()),
        Err(e) => println!("child-replica separator FAILED in {:?}: {}", t.elapsed(), e),
    }
}
