use serde::{Deserialize, Serialize};

use super::check::check_mis;
use super::order::{composite_order, greedy_order, rank_order, sequential_greedy};
use crate::algorithms::Algorithm;
use crate::graph::{Graph, NodeId};
use crate::runner::RunOutcome;

/// Result of comparing a run's MIS with the sequential greedy oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Equivalence {
    Match,
    Mismatch {
        first_difference: NodeId,
        distributed: Vec<NodeId>,
        oracle: Vec<NodeId>,
    },
    /// Full tapes collide, so the rank order is not total.
    SkippedTie { pairs: Vec<(NodeId, NodeId)> },
    /// The truncated variant produced an invalid MIS (a leaf ran out of time).
    SkippedInvalid,
    /// Luby has no fixed order to compare against.
    NotApplicable,
}

impl Equivalence {
    pub fn is_mismatch(&self) -> bool {
        matches!(self, Equivalence::Mismatch { .. })
    }
}

/// Compares the MIS of `outcome` with sequential greedy under the order the
/// algorithm is expected to realize:
///
/// * sleeping: decreasing full rank `r_K` (skipped on tape ties);
/// * fast: decreasing `(X_K..X_1, leaf rank, ID)`, only for valid runs;
/// * greedy: decreasing `(rank, ID)`.
pub fn compare_with_oracle(graph: &Graph, outcome: &RunOutcome) -> Equivalence {
    let order = match outcome.algorithm {
        Algorithm::Sleeping => match rank_order(&outcome.tapes) {
            Ok(order) => order,
            Err(tie) => return Equivalence::SkippedTie { pairs: tie.pairs },
        },
        Algorithm::Fast => {
            if !check_mis(graph, &outcome.outputs).is_valid() {
                return Equivalence::SkippedInvalid;
            }
            composite_order(&outcome.tapes, &outcome.ranks)
        }
        Algorithm::Greedy => greedy_order(&outcome.ranks),
        Algorithm::Luby => return Equivalence::NotApplicable,
    };
    let oracle = sequential_greedy(graph, &order).expect("orders are permutations");
    let distributed = outcome.mis();
    if distributed == oracle {
        return Equivalence::Match;
    }
    let first_difference = graph
        .nodes()
        .find(|v| distributed.binary_search(v).is_ok() != oracle.binary_search(v).is_ok())
        .expect("sets differ somewhere");
    Equivalence::Mismatch {
        first_difference,
        distributed,
        oracle,
    }
}
