use serde::{Deserialize, Serialize};

use crate::algorithms::MisStatus;
use crate::graph::{Graph, NodeId};

/// Outcome of checking a claimed MIS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    /// Both endpoints of this edge claim membership.
    NotIndependent { u: NodeId, v: NodeId },
    /// This node is outside the set and has no neighbor inside it.
    NotMaximal { node: NodeId },
    /// This node never decided.
    Undecided { node: NodeId },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    /// Short label used in CSV and JSON output.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::NotIndependent { .. } => "not_independent",
            Verdict::NotMaximal { .. } => "not_maximal",
            Verdict::Undecided { .. } => "undecided",
        }
    }
}

/// Checks independence, then maximality, then that every node decided.
/// Runs in `O(n + m)`.
pub fn check_mis(graph: &Graph, outputs: &[MisStatus]) -> Verdict {
    assert_eq!(outputs.len(), graph.n(), "one output per node");
    if let Some((u, v)) = graph
        .edges()
        .find(|&(u, v)| outputs[u as usize].is_in() && outputs[v as usize].is_in())
    {
        return Verdict::NotIndependent { u, v };
    }
    let undominated = graph.nodes().find(|&v| {
        !outputs[v as usize].is_in()
            && !graph.neighbors(v).iter().any(|&w| outputs[w as usize].is_in())
    });
    if let Some(node) = undominated {
        return Verdict::NotMaximal { node };
    }
    if let Some(node) = graph
        .nodes()
        .find(|&v| outputs[v as usize] == MisStatus::Unknown)
    {
        return Verdict::Undecided { node };
    }
    Verdict::Valid
}
