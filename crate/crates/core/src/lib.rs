//! Deterministic simulation of distributed maximal independent set
//! algorithms in the sleeping model, with oracles that check the outputs
//! and the round and awake accounting.

pub mod algorithms;
pub mod engine;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod runner;
pub mod schedule;

pub use algorithms::{AlgoParams, Algorithm, BitTape, CallRecord, MisMsg, MisStatus};
pub use engine::{run, EngineConfig, NodeProgram, Stepping, Trace};
pub use error::{ConfigError, EngineError, ParseError};
pub use graph::{generate, parse_edge_list, Family, Graph, GraphSpec, NodeId};
pub use metrics::{compute_metrics, format_ratio, ComplexityMetrics};
pub use num_rational::Ratio;
pub use oracle::{check_mis, Verdict};
pub use runner::{simulate, RunOutcome, SimulateError};
