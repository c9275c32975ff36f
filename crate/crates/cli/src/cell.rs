//! One (algorithm, graph, seed) simulation and its serialized forms.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use sleepmis_core::engine::{EngineConfig, Trace};
use sleepmis_core::metrics::format_ratio;
use sleepmis_core::{
    compute_metrics, generate, simulate, AlgoParams, ComplexityMetrics, EngineError, Family, Graph,
    GraphSpec, MisStatus, RunOutcome, SimulateError,
};

use crate::error::CliError;

pub struct Cell {
    pub graph: Graph,
    pub result: CellResult,
    pub runtime_ms: u64,
}

pub enum CellResult {
    Done {
        outcome: Box<RunOutcome>,
        metrics: ComplexityMetrics,
    },
    /// Hit the round cap.
    Timeout,
}

/// Generates the graph (graph seed = run seed) and simulates. Timeouts are
/// a result; every other engine error is returned.
pub fn run_cell(
    family: &Family,
    params: &AlgoParams,
    seed: u64,
    engine: EngineConfig,
) -> Result<Cell, CliError> {
    let graph = generate(&GraphSpec::new(family.clone(), seed))?;
    let started = Instant::now();
    let result = match simulate(&graph, params, seed, engine) {
        Ok(outcome) => {
            let metrics = compute_metrics(&graph, &outcome.trace, &outcome.outputs)?;
            CellResult::Done {
                outcome: Box::new(outcome),
                metrics,
            }
        }
        Err(SimulateError::Engine(EngineError::Timeout { .. })) => CellResult::Timeout,
        Err(e) => return Err(e.into()),
    };
    Ok(Cell {
        graph,
        result,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}

/// One CSV row; the JSON output of `run` uses the same keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algo: String,
    pub family: String,
    pub n: u64,
    pub m: u64,
    pub seed: u64,
    pub avg_awake: Option<String>,
    pub max_awake: Option<u64>,
    pub total_rounds: Option<u64>,
    pub avg_finish: Option<String>,
    pub mis_size: Option<u64>,
    pub verdict: String,
    pub rank_tie_flag: bool,
    pub runtime_ms: Option<u64>,
}

impl ResultRow {
    pub fn new(params: &AlgoParams, label: &str, seed: u64, cell: &Cell, timing: bool) -> Self {
        let mut row = ResultRow {
            algo: params.algorithm.name().to_string(),
            family: label.to_string(),
            n: cell.graph.n() as u64,
            m: cell.graph.m() as u64,
            seed,
            avg_awake: None,
            max_awake: None,
            total_rounds: None,
            avg_finish: None,
            mis_size: None,
            verdict: "timeout".to_string(),
            rank_tie_flag: false,
            runtime_ms: timing.then_some(cell.runtime_ms),
        };
        if let CellResult::Done { outcome, metrics } = &cell.result {
            row.avg_awake = Some(format_ratio(&metrics.avg_awake));
            row.max_awake = Some(metrics.max_awake);
            row.total_rounds = Some(metrics.total_rounds);
            row.avg_finish = Some(format_ratio(&metrics.avg_finish));
            row.mis_size = Some(metrics.mis_size);
            row.verdict = metrics.verdict.label().to_string();
            row.rank_tie_flag = outcome.has_rank_tie();
        }
        row
    }

    /// Canonical order: algorithm, family, n, seed.
    pub fn sort_key(&self) -> (&str, &str, u64, u64) {
        (&self.algo, &self.family, self.n, self.seed)
    }
}

/// Everything needed to re-validate a run offline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDump {
    pub version: String,
    pub algo: String,
    /// Concrete graph spec; the graph is regenerated with `seed`.
    pub graph: String,
    pub seed: u64,
    pub depth: u32,
    pub c: u32,
    pub verdict: String,
    pub outputs: Vec<MisStatus>,
    pub trace: Trace,
}

impl TraceDump {
    pub fn new(spec: &str, params: &AlgoParams, outcome: &RunOutcome, metrics: &ComplexityMetrics) -> Self {
        TraceDump {
            version: env!("CARGO_PKG_VERSION").to_string(),
            algo: params.algorithm.name().to_string(),
            graph: spec.to_string(),
            seed: outcome.seed,
            depth: outcome.depth,
            c: params.c,
            verdict: metrics.verdict.label().to_string(),
            outputs: outcome.outputs.clone(),
            trace: outcome.trace.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string(self).map_err(|source| CliError::Json {
            path: path.into(),
            source,
        })?;
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.into(),
            source,
        })
    }
}

/// Regenerates the graph of a dump and checks its outputs and counters.
pub fn recheck(dump: &TraceDump) -> Result<ComplexityMetrics, CliError> {
    let family: Family = dump.graph.parse()?;
    let graph = generate(&GraphSpec::new(family, dump.seed))?;
    Ok(compute_metrics(&graph, &dump.trace, &dump.outputs)?)
}
