use num_rational::Ratio;

use super::reference::centralized_sleeping_mis;
use crate::algorithms::BitTape;
use crate::error::ConfigError;
use crate::graph::Graph;

/// Largest `n * K` for which all tapes are enumerated.
pub const ENUMERATION_LIMIT: u32 = 24;

/// Exact expectations of the root call's left and right participant counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactExpectation {
    pub size_u: u64,
    pub left: Ratio<u64>,
    pub right: Ratio<u64>,
    pub tapes_enumerated: u64,
}

/// Averages root `|L|` and `|R|` over every one of the `2^(n K)` tape
/// assignments, evaluating each with the centralized recursion.
pub fn exact_expectation(graph: &Graph, depth: u32) -> Result<ExactExpectation, ConfigError> {
    let n = graph.n() as u32;
    let bits = n.saturating_mul(depth);
    if bits > ENUMERATION_LIMIT {
        return Err(ConfigError::new(format!(
            "exact enumeration needs n*K <= {ENUMERATION_LIMIT} (got {n}*{depth} = {bits}); \
             use the sampled pruning statistics instead"
        )));
    }
    let total = 1u64 << bits;
    let mask = if depth == 0 { 0 } else { (1u64 << depth) - 1 };
    let (mut left, mut right) = (0u64, 0u64);
    let mut tapes = vec![BitTape::from_value(0, depth); n as usize];
    for assignment in 0..total {
        for (v, tape) in tapes.iter_mut().enumerate() {
            *tape = BitTape::from_value(assignment >> (v as u32 * depth) & mask, depth);
        }
        let run = centralized_sleeping_mis(graph, &tapes);
        if let Some(root) = run.records.first() {
            left += root.size_l;
            right += root.size_r;
        }
    }
    Ok(ExactExpectation {
        size_u: u64::from(n),
        left: Ratio::new(left, total),
        right: Ratio::new(right, total),
        tapes_enumerated: total,
    })
}
