use pmf_core::generate::{generate, Kind};
use pmf_core::msms::{msms_maxflow, SolveOptions};
use std::time::Instant;

fn main() {
    let p = generate(Kind::Grid, 160000, 0, (0, 100));
    for base in [64usize, 256, 1024] {
        let opts = SolveOptions { base_size: base, ..Default::default() };
        let t = Instant::now();
        let out = msms_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks, &opts).unwrap();
        println!(
            "base {:4}: {:?} value {} calls {} base_calls {} max_aux {}",
            base,
            t.elapsed(),
            out.value,
            out.instr.calls,
            out.instr.base_calls,
            out.instr.max_aux
        );
    }
}
