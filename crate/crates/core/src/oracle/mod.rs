//! Independent correctness oracles: MIS checking, sequential greedy under
//! the orders the distributed algorithms should realize, a centralized
//! evaluation of the recursion, exhaustive expectations for tiny graphs,
//! and sample statistics for the per-call participant counts.

mod check;
mod equivalence;
mod exact;
mod order;
mod pruning;
mod reference;

pub use check::{check_mis, Verdict};
pub use equivalence::{compare_with_oracle, Equivalence};
pub use exact::{exact_expectation, ExactExpectation, ENUMERATION_LIMIT};
pub use order::{composite_order, greedy_order, rank_order, sequential_greedy, TieError};
pub use pruning::{pruning_stats, Estimate, LevelStat, PruningReport};
pub use reference::{centralized_sleeping_mis, CentralizedRun};

use crate::algorithms::AlgoParams;
use crate::engine::EngineConfig;
use crate::graph::Graph;
use crate::runner::{simulate, RunOutcome, SimulateError};

/// Simulates `params.algorithm` with `seed` and compares against the
/// sequential greedy oracle.
pub fn equivalence_check(
    graph: &Graph,
    params: &AlgoParams,
    seed: u64,
) -> Result<(RunOutcome, Equivalence), SimulateError> {
    let outcome = simulate(graph, params, seed, EngineConfig::default())?;
    let eq = compare_with_oracle(graph, &outcome);
    Ok((outcome, eq))
}
