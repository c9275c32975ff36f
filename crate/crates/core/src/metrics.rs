//! Awake and round complexity of a finished run.

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algorithms::MisStatus;
use crate::engine::Trace;
use crate::error::ConfigError;
use crate::graph::Graph;
use crate::oracle::{check_mis, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityMetrics {
    pub n: u64,
    /// Mean awake rounds per node.
    pub avg_awake: Ratio<u64>,
    pub max_awake: u64,
    pub total_rounds: u64,
    /// Mean of the last awake round per node.
    pub avg_finish: Ratio<u64>,
    pub mis_size: u64,
    pub verdict: Verdict,
}

/// Computes the metrics. Fails if the trace does not cover every node.
pub fn compute_metrics(
    graph: &Graph,
    trace: &Trace,
    outputs: &[MisStatus],
) -> Result<ComplexityMetrics, ConfigError> {
    let n = graph.n();
    if trace.awake_rounds.len() != n || trace.last_awake.len() != n || outputs.len() != n {
        return Err(ConfigError::new(format!(
            "incomplete trace: {} awake counts, {} finish rounds and {} outputs for {n} nodes",
            trace.awake_rounds.len(),
            trace.last_awake.len(),
            outputs.len()
        )));
    }
    let denom = (n as u64).max(1);
    Ok(ComplexityMetrics {
        n: n as u64,
        avg_awake: Ratio::new(trace.awake_rounds.iter().sum(), denom),
        max_awake: trace.awake_rounds.iter().copied().max().unwrap_or(0),
        total_rounds: trace.total_rounds,
        avg_finish: Ratio::new(trace.last_awake.iter().sum(), denom),
        mis_size: outputs.iter().filter(|s| s.is_in()).count() as u64,
        verdict: check_mis(graph, outputs),
    })
}

/// Renders `r` with exactly six decimals, rounding half up.
pub fn format_ratio(r: &Ratio<u64>) -> String {
    let (num, den) = (u128::from(*r.numer()), u128::from(*r.denom()));
    let scaled = (num * 2_000_000 + den) / (2 * den);
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

/// The six-decimal rendering as a float, for JSON.
pub fn ratio_to_f64(r: &Ratio<u64>) -> f64 {
    format_ratio(r).parse().expect("decimal string")
}

impl Serialize for ComplexityMetrics {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ComplexityMetrics", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("avg_awake", &ratio_to_f64(&self.avg_awake))?;
        st.serialize_field("max_awake", &self.max_awake)?;
        st.serialize_field("total_rounds", &self.total_rounds)?;
        st.serialize_field("avg_finish", &ratio_to_f64(&self.avg_finish))?;
        st.serialize_field("mis_size", &self.mis_size)?;
        st.serialize_field("verdict", self.verdict.label())?;
        st.end()
    }
}
