//! Planar multiple-source multiple-sink maximum flow.
//!
//! The solver recursively splits the graph with simple cycle separators,
//! solves the pieces, and repairs conservation along the separator with
//! dual shortest-path machinery (Hassin-style flows, dense distance
//! tables, an FR-style Dijkstra over Monge submatrices). A blocking-flow
//! oracle, instance generators, a verifier and a bipartite-matching
//! reduction round out the harness.

pub mod dense;
pub mod fix;
pub mod flow;
pub mod generate;
pub mod hassin;
pub mod instance;
pub mod matching;
pub mod msms;
pub mod oracle;
pub mod planar;
pub mod separator;

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Structurally invalid input (bad rotations, non-consecutive path, ...).
    Malformed(String),
    /// Connected embedding whose Euler characteristic is not 2.
    NonPlanar(String),
    /// Operation requires a connected graph.
    Disconnected(String),
    /// Problem-level input error (capacity overflow risk, overlapping terminals, ...).
    Input(String),
    /// An internal contract was violated; indicates a bug upstream.
    Contract(String),
    /// No admissible cycle separator was found.
    NoSeparator(String),
    /// The two nodes do not share a face.
    NotCofacial(String),
    /// Instance file could not be parsed.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Malformed(s) => write!(f, "malformed structure: {s}"),
            Error::NonPlanar(s) => write!(f, "not a planar embedding: {s}"),
            Error::Disconnected(s) => write!(f, "graph not connected: {s}"),
            Error::Input(s) => write!(f, "invalid input: {s}"),
            Error::Contract(s) => write!(f, "contract violation: {s}"),
            Error::NoSeparator(s) => write!(f, "no separator: {s}"),
            Error::NotCofacial(s) => write!(f, "nodes not on a common face: {s}"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

/// Optional runtime checkpointing. When enabled, the solver and the
/// conservation-fixing procedures assert their internal reachability
/// lemmas at every labeled step and report statistics about the run.
#[derive(Debug, Default, Clone)]
pub struct Instrument {
    pub enabled: bool,
    /// Number of checkpoint assertions evaluated.
    pub checkpoints: usize,
    /// Largest auxiliary set seen across all recursive calls.
    pub max_aux: usize,
    pub calls: usize,
    pub base_calls: usize,
    pub separator_fallbacks: usize,
}

impl Instrument {
    pub fn enabled() -> Self {
        Instrument { enabled: true, ..Default::default() }
    }

    pub fn check(&mut self, ok: bool, what: &str) -> Result<()> {
        if self.enabled {
            self.checkpoints += 1;
            if !ok {
                return Err(Error::Contract(format!("checkpoint failed: {what}")));
            }
        }
        Ok(())
    }
}
