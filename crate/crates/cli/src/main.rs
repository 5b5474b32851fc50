//! `pmf`: solve, verify, generate and benchmark planar multi-terminal
//! max-flow instances (PMFv1 text format).
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 internal
//! contract violation.

use clap::{Parser, Subcommand, ValueEnum};
use pmf_core::generate::{generate, random_planar_bipartite, Kind};
use pmf_core::instance::{verify, FlowProblem, FlowSolution, RunReport};
use pmf_core::matching::{matching_oracle, planar_bipartite_matching};
use pmf_core::msms::{msms_maxflow, SolveOptions};
use pmf_core::oracle::oracle_maxflow;
use pmf_core::Error;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "pmf", about = "planar multiple-source multiple-sink maximum flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Msms,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print (or write) the flow
    Solve {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "msms")]
        algo: Algo,
        /// Verify the solution after solving
        #[arg(long)]
        check: bool,
        /// Enable internal lemma checkpoints
        #[arg(long)]
        instrument: bool,
        /// Machine-readable report on stdout
        #[arg(long)]
        json: bool,
    },
    /// Check a solution file against an instance
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Generate an instance
    Gen {
        #[arg(long, default_value = "grid")]
        kind: String,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        cap_min: i64,
        #[arg(long, default_value_t = 100)]
        cap_max: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the solver across sizes (CSV: kind,n,m,value,time_ms)
    Bench {
        #[arg(long, default_value = "grid")]
        kind: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 400, 1600])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timing runs per size (median reported)
        #[arg(long, default_value_t = 3)]
        runs: usize,
        /// Also run the reference oracle and compare values
        #[arg(long)]
        check: bool,
    },
    /// Maximum matching on a random planar bipartite instance
    Match {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Input(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Contract(_) => 3,
        _ => 2,
    }
}

fn run() -> Result<i32, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve { input, output, algo, check, instrument, json } => {
            let text = read_input(&input)?;
            let p = FlowProblem::parse_text(&text)?;
            p.validate()?;
            let start = Instant::now();
            let (flow, value, checkpoints) = match algo {
                Algo::Msms => {
                    let opts = SolveOptions { instrument, ..Default::default() };
                    let out = msms_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks, &opts)?;
                    (out.flow, out.value, out.instr.checkpoints)
                }
                Algo::Oracle => {
                    let (v, f) = oracle_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks);
                    let f = pmf_core::flow::finalize_pseudoflow(
                        &p.graph, &p.caps, &f, &p.sources, &p.sinks,
                    );
                    (f, v, 0)
                }
            };
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let sol = FlowSolution::from_flow(&p, &flow);
            let mut ok = true;
            let mut checks = serde_json::json!({});
            if check {
                let rep = verify(&p, &sol);
                ok = rep.ok();
                checks = serde_json::to_value(&rep).unwrap();
                if instrument {
                    checks["checkpoints"] = serde_json::json!(checkpoints);
                }
            }
            if let Some(out) = output {
                std::fs::write(&out, sol.write_text())
                    .map_err(|e| Error::Input(format!("cannot write {}: {e}", out.display())))?;
            }
            if json {
                let report = RunReport {
                    n: p.graph.live_node_count(),
                    m: p.graph.live_edge_count(),
                    value,
                    time_ms: elapsed,
                    checks,
                };
                println!("{}", serde_json::to_string(&report).unwrap());
            } else {
                println!("value {value}");
                if check {
                    println!("checks {}", if ok { "pass" } else { "FAIL" });
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Verify { input, solution, json } => {
            let p = FlowProblem::parse_text(&read_input(&Some(input))?)?;
            let sol = FlowSolution::parse_text(&read_input(&Some(solution))?)?;
            let rep = verify(&p, &sol);
            if json {
                println!("{}", serde_json::to_string(&rep).unwrap());
            } else {
                for item in &rep.items {
                    println!("{} {}: {}", if item.ok { "ok  " } else { "FAIL" }, item.name, item.detail);
                }
            }
            Ok(if rep.ok() { 0 } else { 1 })
        }
        Command::Gen { kind, n, seed, cap_min, cap_max, output } => {
            let kind = Kind::parse(&kind)
                .ok_or_else(|| Error::Input(format!("unknown kind {kind:?}")))?;
            let p = generate(kind, n, seed, (cap_min, cap_max));
            let text = p.write_text();
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Bench { kind, sizes, seed, runs, check } => {
            let kind = Kind::parse(&kind)
                .ok_or_else(|| Error::Input(format!("unknown kind {kind:?}")))?;
            println!("kind,n,m,value,time_ms");
            let mut ok = true;
            for (i, &n) in sizes.iter().enumerate() {
                let p = generate(kind, n, seed + i as u64, (0, 100));
                let mut times = Vec::new();
                let mut value = 0;
                for _ in 0..runs.max(1) {
                    let start = Instant::now();
                    let out =
                        msms_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks, &SolveOptions::default())?;
                    times.push(start.elapsed().as_secs_f64() * 1e3);
                    value = out.value;
                }
                if check {
                    let (want, _) = oracle_maxflow(&p.graph, &p.caps, &p.sources, &p.sinks);
                    if want != value {
                        eprintln!("value mismatch at n={n}: msms {value} oracle {want}");
                        ok = false;
                    }
                }
                times.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let median = times[times.len() / 2];
                println!(
                    "{},{},{},{},{:.2}",
                    kind.name(),
                    p.graph.live_node_count(),
                    p.graph.live_edge_count(),
                    value,
                    median
                );
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Match { n, seed, json } => {
            let (g, left, right) = random_planar_bipartite(n, seed);
            let matched = planar_bipartite_matching(&g, &left, &right)?;
            let want = matching_oracle(&g, &left, &right);
            if json {
                println!(
                    "{}",
                    serde_json::json!({"n": g.live_node_count(), "matching": matched.len(), "oracle": want})
                );
            } else {
                println!("matching {} (oracle {})", matched.len(), want);
            }
            Ok(if matched.len() == want { 0 } else { 1 })
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}
