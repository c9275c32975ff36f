//! Randomized properties of the four algorithms on small graphs.

use proptest::prelude::*;

use sleepmis_core::algorithms::CallRecord;
use sleepmis_core::engine::{EngineConfig, Stepping};
use sleepmis_core::oracle::{
    centralized_sleeping_mis, check_mis, compare_with_oracle, Equivalence,
};
use sleepmis_core::schedule::{fast_schedule, t_schedule};
use sleepmis_core::{compute_metrics, simulate, AlgoParams, Algorithm, Graph, MisStatus, NodeId};

/// Graph on `n <= 12` nodes with each pair present when its mask bit is set.
fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..=12, any::<u64>(), 0u32..=3).prop_map(|(n, mask, density)| {
        let mut edges = Vec::new();
        let mut bit = 0u32;
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                // density 0..=3 keeps roughly 1/8, 1/4, 1/2 or 3/4 of the pairs
                let keep = match density {
                    0 => mask.rotate_left(bit) & 0b111 == 0,
                    1 => mask.rotate_left(bit) & 0b11 == 0,
                    2 => mask.rotate_left(bit) & 1 == 0,
                    _ => mask.rotate_left(bit) & 0b11 != 0,
                };
                if keep {
                    edges.push((u, v));
                }
                bit += 1;
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    })
}

fn run(g: &Graph, algo: Algorithm, seed: u64) -> sleepmis_core::RunOutcome {
    simulate(g, &AlgoParams::new(algo), seed, EngineConfig::default()).unwrap()
}

fn partition_holds(r: &CallRecord) -> bool {
    r.isolated_joins + r.size_l <= r.size_u
        && r.size_r <= r.size_u - r.size_l - r.isolated_joins
        && r.second_detection_joins + r.size_r + r.eliminations <= r.size_u - r.size_l - r.isolated_joins
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sleeping_is_valid_and_matches_oracle_without_ties(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Sleeping, seed);
        let eq = compare_with_oracle(&g, &out);
        if out.has_rank_tie() {
            let skipped = matches!(eq, Equivalence::SkippedTie { .. });
            prop_assert!(skipped);
        } else {
            prop_assert!(check_mis(&g, &out.outputs).is_valid());
            prop_assert_eq!(eq, Equivalence::Match);
        }
    }

    #[test]
    fn sleeping_schedule_and_awake_bound(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Sleeping, seed);
        let k = out.depth;
        if g.n() >= 2 {
            prop_assert_eq!(out.trace.total_rounds, t_schedule(k));
        }
        for &a in &out.trace.awake_rounds {
            prop_assert!(a <= 3 * (u64::from(k) + 1));
        }
        for r in &out.trace.call_records {
            prop_assert!(partition_holds(r), "{r:?}");
        }
    }

    #[test]
    fn engine_route_agrees_with_centralized_recursion(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Sleeping, seed);
        let central = centralized_sleeping_mis(&g, &out.tapes);
        prop_assert_eq!(&out.outputs, &central.statuses);
        prop_assert_eq!(&out.trace.call_records, &central.records);
    }

    #[test]
    fn fast_schedule_is_seed_independent(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Fast, seed);
        let n = g.n();
        if n >= 2 {
            prop_assert_eq!(out.trace.total_rounds, fast_schedule(out.depth, n, 6));
        }
        let eq = compare_with_oracle(&g, &out);
        prop_assert!(!eq.is_mismatch(), "{eq:?}");
        for r in &out.trace.call_records {
            prop_assert!(partition_holds(r), "{r:?}");
        }
    }

    #[test]
    fn greedy_equals_sequential_greedy(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Greedy, seed);
        prop_assert!(check_mis(&g, &out.outputs).is_valid());
        prop_assert_eq!(compare_with_oracle(&g, &out), Equivalence::Match);
    }

    #[test]
    fn luby_is_valid(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Luby, seed);
        prop_assert!(check_mis(&g, &out.outputs).is_valid());
        prop_assert!(!out.has_rank_tie());
    }

    #[test]
    fn stepping_modes_agree(g in small_graph(), seed in any::<u64>(), a in 0usize..4) {
        let algo = Algorithm::ALL[a];
        let mut params = AlgoParams::new(algo);
        if algo == Algorithm::Sleeping {
            // Keeps the every-round reference mode short.
            params.depth = Some(8);
        }
        let ff = simulate(&g, &params, seed, EngineConfig::default()).unwrap();
        let every = EngineConfig { stepping: Stepping::EveryRound, ..EngineConfig::default() };
        let st = simulate(&g, &params, seed, every).unwrap();
        prop_assert_eq!(ff.outputs, st.outputs);
        prop_assert_eq!(ff.trace, st.trace);
    }

    #[test]
    fn metrics_invariants(g in small_graph(), seed in any::<u64>(), a in 0usize..4) {
        let out = run(&g, Algorithm::ALL[a], seed);
        let m = compute_metrics(&g, &out.trace, &out.outputs).unwrap();
        prop_assert!(m.avg_awake <= num_rational::Ratio::from_integer(m.max_awake));
        prop_assert!(m.max_awake <= m.total_rounds);
        prop_assert!(m.avg_finish <= num_rational::Ratio::from_integer(m.total_rounds));
        prop_assert!(m.mis_size <= g.n() as u64);
        for v in 0..g.n() {
            prop_assert!(out.trace.last_awake[v] <= out.trace.total_rounds);
            prop_assert!(out.trace.awake_rounds[v] <= out.trace.total_rounds);
        }
    }

    #[test]
    fn decided_outputs_never_unknown_for_full_recursion(g in small_graph(), seed in any::<u64>()) {
        let out = run(&g, Algorithm::Sleeping, seed);
        prop_assert!(out.outputs.iter().all(|s| *s != MisStatus::Unknown));
    }
}

#[test]
fn reruns_are_identical() {
    let g = sleepmis_core::generate(&sleepmis_core::GraphSpec::new(
        "gnp:n=60,p=0.1".parse().unwrap(),
        4,
    ))
    .unwrap();
    for a in Algorithm::ALL {
        let x = run(&g, a, 9);
        let y = run(&g, a, 9);
        assert_eq!(x.outputs, y.outputs);
        assert_eq!(x.trace, y.trace);
    }
}
