//! Sequential greedy MIS and the node orders it is run under.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algorithms::BitTape;
use crate::error::ConfigError;
use crate::graph::{Graph, NodeId};

/// Scans `order` and adds each node that has no earlier-added neighbor.
/// Returns the lexicographically-first MIS for that order, sorted by ID.
pub fn sequential_greedy(graph: &Graph, order: &[NodeId]) -> Result<Vec<NodeId>, ConfigError> {
    let n = graph.n();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(ConfigError::new(format!(
            "order has {} entries, graph has {n} nodes",
            order.len()
        )));
    }
    for &v in order {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return Err(ConfigError::new(format!("order is not a permutation (at {v})")));
        }
    }
    let mut joined = vec![false; n];
    for &v in order {
        if !graph.neighbors(v).iter().any(|&w| joined[w as usize]) {
            joined[v as usize] = true;
        }
    }
    Ok((0..n as NodeId).filter(|&v| joined[v as usize]).collect())
}

/// Two or more nodes with identical full tapes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieError {
    pub pairs: Vec<(NodeId, NodeId)>,
}

impl fmt::Display for TieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} pair(s) of nodes share a tape", self.pairs.len())
    }
}

impl std::error::Error for TieError {}

/// Nodes sorted by strictly decreasing full rank `r_K`.
pub fn rank_order(tapes: &[BitTape]) -> Result<Vec<NodeId>, TieError> {
    let mut order: Vec<NodeId> = (0..tapes.len() as NodeId).collect();
    order.sort_by(|&a, &b| tapes[b as usize].value().cmp(&tapes[a as usize].value()).then(a.cmp(&b)));
    let mut pairs = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && tapes[order[j] as usize] == tapes[order[i] as usize] {
            j += 1;
        }
        for a in i..j {
            for b in a + 1..j {
                pairs.push((order[a], order[b]));
            }
        }
        i = j;
    }
    if pairs.is_empty() {
        Ok(order)
    } else {
        Err(TieError { pairs })
    }
}

/// Order for the truncated variant: decreasing `(X_K, ..., X_1, leaf rank,
/// node ID)`. Always total.
pub fn composite_order(tapes: &[BitTape], ranks: &[u64]) -> Vec<NodeId> {
    assert_eq!(tapes.len(), ranks.len());
    let mut order: Vec<NodeId> = (0..tapes.len() as NodeId).collect();
    order.sort_by_key(|&v| std::cmp::Reverse((tapes[v as usize].value(), ranks[v as usize], v)));
    order
}

/// Order of the standalone greedy: decreasing `(rank, node ID)`.
pub fn greedy_order(ranks: &[u64]) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..ranks.len() as NodeId).collect();
    order.sort_by_key(|&v| std::cmp::Reverse((ranks[v as usize], v)));
    order
}
