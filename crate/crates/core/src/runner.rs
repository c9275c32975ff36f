//! One-call simulation of any of the four algorithms on a graph.

use crate::algorithms::{
    aggregate_calls, AlgoParams, Algorithm, BitTape, GreedyCore, GreedyProgram, LubyProgram,
    MisStatus, RecursiveMis,
};
use crate::engine::{run, EngineConfig, Execution, NodeProgram, Trace};
use crate::error::{ConfigError, EngineError};
use crate::graph::{Graph, NodeId};
use crate::schedule::{fast_depth, sleeping_depth};

/// Outputs and trace of one run, plus the random inputs that produced them.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Recursion depth `K` (0 for greedy and Luby).
    pub depth: u32,
    pub outputs: Vec<MisStatus>,
    pub trace: Trace,
    /// Recursion tapes, for the recursive variants.
    pub tapes: Vec<BitTape>,
    /// Greedy ranks, for the fast and greedy variants.
    pub ranks: Vec<u64>,
}

impl RunOutcome {
    /// Whether two nodes share the priority key that orders this run:
    /// tapes (sleeping), tape plus rank (fast), rank (greedy). Luby never
    /// reports ties.
    pub fn has_rank_tie(&self) -> bool {
        let mut keys: Vec<(u64, u64)> = match self.algorithm {
            Algorithm::Sleeping => self.tapes.iter().map(|t| (t.value(), 0)).collect(),
            Algorithm::Fast => self
                .tapes
                .iter()
                .zip(&self.ranks)
                .map(|(t, &r)| (t.value(), r))
                .collect(),
            Algorithm::Greedy => self.ranks.iter().map(|&r| (r, 0)).collect(),
            Algorithm::Luby => return false,
        };
        keys.sort_unstable();
        keys.windows(2).any(|w| w[0] == w[1])
    }

    pub fn mis(&self) -> Vec<NodeId> {
        in_set(&self.outputs)
    }
}

pub(crate) fn in_set(outputs: &[MisStatus]) -> Vec<NodeId> {
    outputs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_in())
        .map(|(v, _)| v as NodeId)
        .collect()
}

/// Recursion depth the given parameters select for an `n`-node graph.
pub fn depth_for(params: &AlgoParams, n: usize) -> u32 {
    match params.algorithm {
        Algorithm::Sleeping => params.depth.unwrap_or_else(|| sleeping_depth(n)),
        Algorithm::Fast => params.depth.unwrap_or_else(|| fast_depth(n)),
        Algorithm::Greedy | Algorithm::Luby => 0,
    }
}

/// Runs `params.algorithm` on `graph` with all randomness derived from `seed`.
pub fn simulate(
    graph: &Graph,
    params: &AlgoParams,
    seed: u64,
    engine: EngineConfig,
) -> Result<RunOutcome, SimulateError> {
    params.validate()?;
    let n = graph.n();
    let depth = depth_for(params, n);
    let tapes: Vec<BitTape> = match params.algorithm {
        Algorithm::Sleeping | Algorithm::Fast => graph
            .nodes()
            .map(|v| BitTape::generate(seed, v, depth))
            .collect(),
        _ => Vec::new(),
    };
    let ranks: Vec<u64> = match params.algorithm {
        Algorithm::Fast | Algorithm::Greedy => graph
            .nodes()
            .map(|v| GreedyCore::draw_rank(seed, v, n))
            .collect(),
        _ => Vec::new(),
    };
    let mut outcome = RunOutcome {
        algorithm: params.algorithm,
        seed,
        depth,
        outputs: Vec::new(),
        trace: Trace::default(),
        tapes,
        ranks,
    };
    match params.algorithm {
        Algorithm::Sleeping => {
            let programs = graph
                .nodes()
                .map(|v| RecursiveMis::sleeping(v, outcome.tapes[v as usize]))
                .collect();
            finish_recursive(&mut outcome, run(graph, programs, engine)?);
        }
        Algorithm::Fast => {
            let programs = graph
                .nodes()
                .map(|v| {
                    let i = v as usize;
                    RecursiveMis::fast(v, outcome.tapes[i], n, params.c, outcome.ranks[i])
                })
                .collect();
            finish_recursive(&mut outcome, run(graph, programs, engine)?);
        }
        Algorithm::Greedy => {
            let programs = graph
                .nodes()
                .map(|v| GreedyProgram::new(v, outcome.ranks[v as usize]))
                .collect();
            finish_plain(&mut outcome, run(graph, programs, engine)?);
        }
        Algorithm::Luby => {
            let programs = graph.nodes().map(|v| LubyProgram::new(v, n, seed)).collect();
            finish_plain(&mut outcome, run(graph, programs, engine)?);
        }
    }
    Ok(outcome)
}

fn finish_recursive(outcome: &mut RunOutcome, ex: Execution<RecursiveMis>) {
    let mut trace = ex.trace;
    trace.call_records = aggregate_calls(ex.programs.iter().flat_map(|p| p.participations()));
    outcome.outputs = ex.outputs;
    outcome.trace = trace;
}

fn finish_plain<P: NodeProgram<Output = MisStatus>>(outcome: &mut RunOutcome, ex: Execution<P>) {
    outcome.outputs = ex.outputs;
    outcome.trace = ex.trace;
}

#[derive(Debug, thiserror::Error)]
pub enum SimulateError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    #[test]
    fn rank_tie_detection() {
        let g = Graph::empty(2);
        let mut out = simulate(&g, &AlgoParams::new(Algorithm::Sleeping), 0, EngineConfig::default()).unwrap();
        out.tapes = vec![BitTape::from_value(5, 3); 2];
        assert!(out.has_rank_tie());
        out.tapes[1] = BitTape::from_value(4, 3);
        assert!(!out.has_rank_tie());
    }

    #[test]
    fn all_algorithms_produce_outputs_for_every_node() {
        let g = generate(&GraphSpec::new("gnp:n=40,p=0.1".parse().unwrap(), 3)).unwrap();
        for a in Algorithm::ALL {
            let out = simulate(&g, &AlgoParams::new(a), 11, EngineConfig::default()).unwrap();
            assert_eq!(out.outputs.len(), 40);
            assert!(!out.mis().is_empty());
        }
    }

    #[test]
    fn zero_c_is_rejected() {
        let mut p = AlgoParams::new(Algorithm::Fast);
        p.c = 0;
        assert!(matches!(
            simulate(&Graph::empty(3), &p, 0, EngineConfig::default()),
            Err(SimulateError::Config(_))
        ));
    }
}
