//! The recursive sleeping MIS as an explicit per-node state machine.
//!
//! A call at level `k >= 1` that starts in round `s` occupies `D(k)` rounds:
//!
//! | round                 | step                                   |
//! |-----------------------|----------------------------------------|
//! | `s`                   | first isolated-node detection          |
//! | `s+1 ..= s+D(k-1)`    | left recursive call (others sleep)     |
//! | `s+D(k-1)+1`          | synchronization (elimination)          |
//! | `s+D(k-1)+2`          | second isolated-node detection         |
//! | `s+D(k-1)+3 ..`       | right recursive call (others sleep)    |
//!
//! so `D(k) = 2 D(k-1) + 3`. With single-node leaves `D(0) = 0`; with greedy
//! leaves `D(0)` is the greedy window. Because every duration is fixed, a
//! node can always compute the absolute round of its next awake step.

use super::{
    wake_at, BitTape, CallPath, GreedyCore, MisMsg, MisStatus, Participation,
};
use crate::engine::{Action, Message, NodeProgram, Outbox, Round};
use crate::graph::NodeId;

/// How a level-0 call is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leaf {
    /// Every participant joins the MIS.
    Join,
    /// Participants run the greedy MIS for exactly `window` rounds, using
    /// `rank` as this node's greedy rank.
    Greedy { window: Round, rank: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Root,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    k: u32,
    start: Round,
    side: Side,
    /// Index into `records` of this call's participation entry.
    record: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Detect,
    Sync,
    Second,
    Greedy,
}

#[derive(Debug, Clone)]
pub struct RecursiveMis {
    tape: BitTape,
    depth: u32,
    /// `durations[k]` is the length of a level-`k` call.
    durations: Vec<Round>,
    leaf: Leaf,
    id: NodeId,
    status: MisStatus,
    stack: Vec<Frame>,
    step: Step,
    greedy: Option<GreedyCore>,
    records: Vec<Participation>,
}

impl RecursiveMis {
    /// `durations` must have `depth + 1` entries satisfying
    /// `durations[k] = 2 durations[k-1] + 3` and `durations[0]` matching the
    /// leaf (0 for [`Leaf::Join`], the window for [`Leaf::Greedy`]).
    pub fn new(id: NodeId, tape: BitTape, depth: u32, durations: Vec<Round>, leaf: Leaf) -> Self {
        assert_eq!(tape.len(), depth, "tape length must equal the recursion depth");
        assert_eq!(durations.len(), depth as usize + 1);
        match leaf {
            Leaf::Join => assert_eq!(durations[0], 0),
            Leaf::Greedy { window, .. } => assert_eq!(durations[0], window),
        }
        RecursiveMis {
            tape,
            depth,
            durations,
            leaf,
            id,
            status: MisStatus::Unknown,
            stack: Vec::with_capacity(depth as usize + 1),
            step: Step::Detect,
            greedy: None,
            records: Vec::with_capacity(depth as usize + 1),
        }
    }

    /// Full-depth program with single-node leaves.
    pub fn sleeping(id: NodeId, tape: BitTape) -> Self {
        let depth = tape.len();
        let durations = (0..=depth).map(crate::schedule::t_schedule).collect();
        RecursiveMis::new(id, tape, depth, durations, Leaf::Join)
    }

    /// Truncated program whose leaves run greedy for `c ceil(log2 n)` rounds.
    pub fn fast(id: NodeId, tape: BitTape, n: usize, c: u32, rank: u64) -> Self {
        let depth = tape.len();
        let durations = (0..=depth)
            .map(|k| crate::schedule::fast_schedule(k, n, c))
            .collect();
        let window = crate::schedule::greedy_window(n, c);
        RecursiveMis::new(id, tape, depth, durations, Leaf::Greedy { window, rank })
    }

    pub fn participations(&self) -> &[Participation] {
        &self.records
    }

    pub fn status(&self) -> MisStatus {
        self.status
    }

    fn top(&self) -> Frame {
        *self.stack.last().expect("an active call")
    }

    fn set_status(&mut self, status: MisStatus) {
        debug_assert_eq!(self.status, MisStatus::Unknown, "status is decided only once");
        self.status = status;
    }

    /// Joins a call at level `k` starting in round `start`, reached from
    /// round `now`.
    fn enter(&mut self, now: Round, k: u32, start: Round, side: Side, path: CallPath) -> Action<MisStatus> {
        self.records.push(Participation {
            path,
            k,
            ..Participation::default()
        });
        self.stack.push(Frame {
            k,
            start,
            side,
            record: self.records.len() - 1,
        });
        if k > 0 {
            self.step = Step::Detect;
            return wake_at(now, start);
        }
        match self.leaf {
            Leaf::Join => {
                self.set_status(MisStatus::InMis);
                self.unwind(now)
            }
            Leaf::Greedy { rank, window } => {
                if window == 0 {
                    return self.unwind(now);
                }
                self.greedy = Some(GreedyCore::new(self.id, rank));
                self.step = Step::Greedy;
                wake_at(now, start)
            }
        }
    }

    /// Leaves the innermost call and every enclosing call that ends in the
    /// same round, then schedules the next step (or termination).
    fn unwind(&mut self, now: Round) -> Action<MisStatus> {
        loop {
            let frame = self.stack.pop().expect("an active call");
            let end = frame.start + self.durations[frame.k as usize] - 1;
            match frame.side {
                Side::Root => {
                    return Action::Terminate {
                        output: self.status,
                        at: end,
                    }
                }
                Side::Left => {
                    self.step = Step::Sync;
                    return wake_at(now, end + 1);
                }
                // A right call ends together with its parent.
                Side::Right => continue,
            }
        }
    }

    fn path_of(&self, frame: Frame) -> CallPath {
        self.records[frame.record].path
    }
}

impl NodeProgram for RecursiveMis {
    type Msg = MisMsg;
    type Output = MisStatus;

    fn start(&mut self) -> Action<MisStatus> {
        self.enter(0, self.depth, 1, Side::Root, CallPath::ROOT)
    }

    fn send(&mut self, round: Round) -> Outbox<MisMsg> {
        match self.step {
            Step::Detect => Outbox::Broadcast(MisMsg::Presence),
            Step::Sync | Step::Second => Outbox::Broadcast(MisMsg::Status(self.status)),
            Step::Greedy => {
                let start = self.top().start;
                self.greedy.as_mut().expect("greedy leaf").send(round - start)
            }
        }
    }

    fn receive(&mut self, round: Round, inbox: &[Message<MisMsg>]) -> Action<MisStatus> {
        let frame = self.top();
        let record = frame.record;
        match self.step {
            Step::Detect => {
                if inbox.is_empty() {
                    self.set_status(MisStatus::InMis);
                    self.records[record].isolated_join = true;
                }
                if self.status == MisStatus::Unknown && self.tape.bit(frame.k) {
                    self.records[record].went_left = true;
                    let path = self.path_of(frame).left();
                    self.enter(round, frame.k - 1, round + 1, Side::Left, path)
                } else {
                    self.step = Step::Sync;
                    wake_at(round, frame.start + self.durations[frame.k as usize - 1] + 1)
                }
            }
            Step::Sync => {
                if self.status == MisStatus::Unknown
                    && inbox
                        .iter()
                        .any(|m| m.payload == MisMsg::Status(MisStatus::InMis))
                {
                    self.set_status(MisStatus::NotInMis);
                    self.records[record].eliminated = true;
                }
                self.step = Step::Second;
                Action::StayAwake
            }
            Step::Second => {
                if self.status == MisStatus::Unknown
                    && inbox
                        .iter()
                        .all(|m| m.payload == MisMsg::Status(MisStatus::NotInMis))
                {
                    self.set_status(MisStatus::InMis);
                    self.records[record].second_join = true;
                }
                if self.status == MisStatus::Unknown {
                    self.records[record].went_right = true;
                    let path = self.path_of(frame).right();
                    self.enter(round, frame.k - 1, round + 1, Side::Right, path)
                } else {
                    self.unwind(round)
                }
            }
            Step::Greedy => {
                let step = round - frame.start;
                let core = self.greedy.as_mut().expect("greedy leaf");
                core.receive(step, inbox);
                let (done, status) = (core.is_done(), core.status());
                let window = self.durations[0];
                if done || step + 1 == window {
                    if status != MisStatus::Unknown {
                        self.set_status(status);
                    }
                    self.greedy = None;
                    self.unwind(round)
                } else {
                    Action::StayAwake
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, EngineConfig, Execution};
    use crate::graph::Graph;
    use crate::schedule::{sleeping_depth, t_schedule};

    fn sleeping(g: &Graph, seed: u64) -> Execution<RecursiveMis> {
        let k = sleeping_depth(g.n());
        let programs = g
            .nodes()
            .map(|v| RecursiveMis::sleeping(v, BitTape::generate(seed, v, k)))
            .collect();
        run(g, programs, EngineConfig::default()).unwrap()
    }

    #[test]
    fn single_node_is_an_immediate_base_case() {
        let ex = sleeping(&Graph::empty(1), 0);
        assert_eq!(ex.outputs, vec![MisStatus::InMis]);
        assert_eq!(ex.trace.awake_rounds, vec![0]);
        assert_eq!(ex.trace.total_rounds, 0);
    }

    #[test]
    fn isolated_pair_hand_trace() {
        for seed in 0..8 {
            let ex = sleeping(&Graph::empty(2), seed);
            assert_eq!(ex.outputs, vec![MisStatus::InMis; 2]);
            // Detection in round 1, then T(2) = 9 rounds asleep, sync in 11,
            // second detection in 12, asleep through the right call until 21.
            assert_eq!(ex.trace.awake_rounds, vec![3, 3]);
            assert_eq!(ex.trace.last_awake, vec![12, 12]);
            assert_eq!(ex.trace.total_rounds, t_schedule(3));
            assert_eq!(ex.trace.total_rounds, 21);
        }
    }

    #[test]
    fn single_edge_with_fixed_tapes() {
        // X_3 = 1 for node 0 only: node 0 recurses left alone, joins as
        // isolated at level 2, and eliminates node 1 at the root sync.
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let programs = vec![
            RecursiveMis::sleeping(0, BitTape::from_bits(&[false, false, true])),
            RecursiveMis::sleeping(1, BitTape::from_bits(&[true, true, false])),
        ];
        let ex = run(&g, programs, EngineConfig::default()).unwrap();
        assert_eq!(ex.outputs, vec![MisStatus::InMis, MisStatus::NotInMis]);
        assert_eq!(ex.trace.total_rounds, 21);
        // Node 0: root detection, level-2 detection/sync/second, root sync
        // and second detection.
        assert_eq!(ex.trace.awake_rounds, vec![6, 3]);
        let root = ex.programs[1].participations()[0];
        assert!(root.eliminated && !root.went_left && !root.went_right);
    }

    #[test]
    fn equal_tapes_on_an_edge_meet_in_a_leaf() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let tape = BitTape::from_bits(&[true, false, true]);
        let programs = vec![RecursiveMis::sleeping(0, tape), RecursiveMis::sleeping(1, tape)];
        let ex = run(&g, programs, EngineConfig::default()).unwrap();
        // Both reach the same base case and both join: the whp failure mode.
        assert_eq!(ex.outputs, vec![MisStatus::InMis; 2]);
        let leaves: Vec<_> = ex.programs[0]
            .participations()
            .iter()
            .filter(|p| p.k == 0)
            .map(|p| p.path.to_string())
            .collect();
        assert_eq!(leaves, vec!["LRL"]);
    }

    #[test]
    fn fast_variant_schedule_is_fixed() {
        let edges: Vec<_> = (0..16u32).map(|v| (v, (v + 1) % 16)).collect();
        let g = Graph::from_edges(16, &edges).unwrap();
        let k = crate::schedule::fast_depth(16);
        for seed in [1, 2] {
            let programs = g
                .nodes()
                .map(|v| {
                    let rank = GreedyCore::draw_rank(seed, v, 16);
                    RecursiveMis::fast(v, BitTape::generate(seed, v, k), 16, 6, rank)
                })
                .collect();
            let ex = run(&g, programs, EngineConfig::default()).unwrap();
            assert_eq!(
                ex.trace.total_rounds,
                crate::schedule::fast_schedule(k, 16, 6)
            );
            assert!(ex.outputs.iter().all(|s| *s != MisStatus::Unknown));
        }
    }
}
