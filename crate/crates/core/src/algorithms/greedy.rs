use rand::Rng;

use super::{MisMsg, MisStatus};
use crate::engine::{Action, Message, NodeProgram, Outbox, Round};
use crate::graph::NodeId;
use crate::rng::{derive_rng, StreamTag};

/// One node's share of the distributed randomized greedy MIS.
///
/// Local step 0 broadcasts the rank. After that, iterations of two steps
/// follow: on odd steps every undecided node whose `(rank, id)` beats all
/// undecided neighbors joins and says so; on even steps the neighbors that
/// were knocked out announce it, so the survivors can shrink their sets.
/// Only nodes that are awake at step 0 count as neighbors, which restricts
/// the computation to the subgraph induced by the participants.
#[derive(Debug, Clone)]
pub struct GreedyCore {
    id: NodeId,
    rank: u64,
    status: MisStatus,
    /// Undecided neighbors as `(rank, id)`.
    rivals: Vec<(u64, NodeId)>,
    knocked_out: bool,
    done: bool,
}

impl GreedyCore {
    pub fn new(id: NodeId, rank: u64) -> Self {
        GreedyCore {
            id,
            rank,
            status: MisStatus::Unknown,
            rivals: Vec::new(),
            knocked_out: false,
            done: false,
        }
    }

    /// Uniform rank in `[0, n^3)` from the node's rank stream.
    pub fn draw_rank(seed: u64, id: NodeId, n: usize) -> u64 {
        let bound = (n as u64).pow(3).max(1);
        derive_rng(seed, id, StreamTag::Rank).gen_range(0..bound)
    }

    pub fn status(&self) -> MisStatus {
        self.status
    }

    /// Decided and announced; nothing left to do.
    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn send(&mut self, step: Round) -> Outbox<MisMsg> {
        if step == 0 {
            return Outbox::Broadcast(MisMsg::Rank(self.rank));
        }
        if step % 2 == 1 {
            let me = (self.rank, self.id);
            if self.status == MisStatus::Unknown && self.rivals.iter().all(|&r| r < me) {
                self.status = MisStatus::InMis;
                return Outbox::Broadcast(MisMsg::Joined);
            }
            Outbox::Silent
        } else if self.knocked_out {
            Outbox::Broadcast(MisMsg::Out)
        } else {
            Outbox::Silent
        }
    }

    pub fn receive(&mut self, step: Round, inbox: &[Message<MisMsg>]) {
        if step == 0 {
            self.rivals = inbox
                .iter()
                .filter_map(|m| match m.payload {
                    MisMsg::Rank(r) => Some((r, m.src)),
                    _ => None,
                })
                .collect();
            return;
        }
        if step % 2 == 1 {
            if self.status == MisStatus::InMis {
                self.done = true;
            } else if inbox.iter().any(|m| m.payload == MisMsg::Joined) {
                self.status = MisStatus::NotInMis;
                self.knocked_out = true;
            }
        } else if self.knocked_out {
            self.done = true;
        } else {
            self.rivals.retain(|&(_, id)| {
                !inbox
                    .iter()
                    .any(|m| m.src == id && m.payload == MisMsg::Out)
            });
        }
    }
}

/// Standalone greedy MIS: every node starts in round 1 and terminates as
/// soon as it has announced its decision.
#[derive(Debug, Clone)]
pub struct GreedyProgram {
    core: GreedyCore,
}

impl GreedyProgram {
    pub fn new(id: NodeId, rank: u64) -> Self {
        GreedyProgram {
            core: GreedyCore::new(id, rank),
        }
    }
}

impl NodeProgram for GreedyProgram {
    type Msg = MisMsg;
    type Output = MisStatus;

    fn start(&mut self) -> Action<MisStatus> {
        Action::StayAwake
    }

    fn send(&mut self, round: Round) -> Outbox<MisMsg> {
        self.core.send(round - 1)
    }

    fn receive(&mut self, round: Round, inbox: &[Message<MisMsg>]) -> Action<MisStatus> {
        self.core.receive(round - 1, inbox);
        if self.core.is_done() {
            Action::Terminate {
                output: self.core.status(),
                at: round,
            }
        } else {
            Action::StayAwake
        }
    }
}
