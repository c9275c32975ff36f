//! Centralized, call-stack recursive evaluation of the full-depth recursion.
//!
//! Shares nothing with the node programs or the engine: it works on node
//! sets directly, so it serves as an independent route to the same MIS and
//! the same per-call statistics.

use crate::algorithms::{BitTape, CallRecord, MisStatus};
use crate::graph::{Graph, NodeId};

pub struct CentralizedRun {
    pub statuses: Vec<MisStatus>,
    /// Per-call records in pre-order.
    pub records: Vec<CallRecord>,
}

/// Evaluates the recursion with tapes of common length `K` (the depth).
pub fn centralized_sleeping_mis(graph: &Graph, tapes: &[BitTape]) -> CentralizedRun {
    assert_eq!(tapes.len(), graph.n());
    let depth = tapes.first().map_or(0, |t| t.len());
    let mut state = State {
        graph,
        tapes,
        status: vec![MisStatus::Unknown; graph.n()],
        member: vec![false; graph.n()],
        records: Vec::new(),
    };
    let all: Vec<NodeId> = graph.nodes().collect();
    if !all.is_empty() {
        state.call(&all, depth, String::new());
    }
    CentralizedRun {
        statuses: state.status,
        records: state.records,
    }
}

struct State<'a> {
    graph: &'a Graph,
    tapes: &'a [BitTape],
    status: Vec<MisStatus>,
    member: Vec<bool>,
    records: Vec<CallRecord>,
}

impl State<'_> {
    fn call(&mut self, set: &[NodeId], k: u32, path: String) {
        let slot = self.records.len();
        self.records.push(CallRecord {
            path: path.clone(),
            k,
            size_u: set.len() as u64,
            ..CallRecord::default()
        });
        if k == 0 {
            for &v in set {
                self.status[v as usize] = MisStatus::InMis;
            }
            return;
        }
        let inner: Vec<Vec<NodeId>> = {
            for &v in set {
                self.member[v as usize] = true;
            }
            let lists = set
                .iter()
                .map(|&v| {
                    self.graph
                        .neighbors(v)
                        .iter()
                        .copied()
                        .filter(|&w| self.member[w as usize])
                        .collect()
                })
                .collect();
            for &v in set {
                self.member[v as usize] = false;
            }
            lists
        };

        for (i, &v) in set.iter().enumerate() {
            if inner[i].is_empty() {
                self.status[v as usize] = MisStatus::InMis;
                self.records[slot].isolated_joins += 1;
            }
        }

        let left: Vec<NodeId> = set
            .iter()
            .copied()
            .filter(|&v| self.status[v as usize] == MisStatus::Unknown && self.tapes[v as usize].bit(k))
            .collect();
        self.records[slot].size_l = left.len() as u64;
        // An empty call still occupies its rounds but leaves no record.
        if !left.is_empty() {
            self.call(&left, k - 1, format!("{path}L"));
        }

        // Synchronization: snapshot, then eliminate.
        let snapshot: Vec<MisStatus> = set.iter().map(|&v| self.status[v as usize]).collect();
        let status_of = |w: NodeId, snap: &[MisStatus]| {
            let i = set.binary_search(&w).expect("neighbor inside the call");
            snap[i]
        };
        for (i, &v) in set.iter().enumerate() {
            if snapshot[i] == MisStatus::Unknown
                && inner[i].iter().any(|&w| status_of(w, &snapshot) == MisStatus::InMis)
            {
                self.status[v as usize] = MisStatus::NotInMis;
                self.records[slot].eliminations += 1;
            }
        }

        let snapshot: Vec<MisStatus> = set.iter().map(|&v| self.status[v as usize]).collect();
        for (i, &v) in set.iter().enumerate() {
            if snapshot[i] == MisStatus::Unknown
                && inner[i].iter().all(|&w| status_of(w, &snapshot) == MisStatus::NotInMis)
            {
                self.status[v as usize] = MisStatus::InMis;
                self.records[slot].second_detection_joins += 1;
            }
        }

        let right: Vec<NodeId> = set
            .iter()
            .copied()
            .filter(|&v| self.status[v as usize] == MisStatus::Unknown)
            .collect();
        self.records[slot].size_r = right.len() as u64;
        if !right.is_empty() {
            self.call(&right, k - 1, format!("{path}R"));
        }
    }
}
