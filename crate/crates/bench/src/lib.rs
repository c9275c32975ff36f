//! Fixtures shared by the benchmarks.

use sleepmis_core::{generate, Graph, GraphSpec};

/// Graph for `spec` generated with seed 0.
pub fn fixture(spec: &str) -> Graph {
    let family = spec.parse().expect("benchmark specs are valid");
    generate(&GraphSpec::new(family, 0)).expect("benchmark graphs generate")
}
