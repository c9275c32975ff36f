use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{MisMsg, MisStatus};
use crate::engine::{Action, Message, NodeProgram, Outbox, Round};
use crate::graph::NodeId;
use crate::rng::{derive_rng, StreamTag};

/// Luby's algorithm with fresh random values every phase.
///
/// A phase is three rounds: undecided nodes exchange values; strict local
/// maxima (ties broken by ID) join and announce; their neighbors drop out
/// and announce.
#[derive(Debug, Clone)]
pub struct LubyProgram {
    id: NodeId,
    rng: ChaCha8Rng,
    bound: u64,
    value: u64,
    status: MisStatus,
    rivals: Vec<(u64, NodeId)>,
}

impl LubyProgram {
    pub fn new(id: NodeId, n: usize, seed: u64) -> Self {
        LubyProgram {
            id,
            rng: derive_rng(seed, id, StreamTag::Luby),
            bound: (n as u64).pow(3).max(1),
            value: 0,
            status: MisStatus::Unknown,
            rivals: Vec::new(),
        }
    }
}

impl NodeProgram for LubyProgram {
    type Msg = MisMsg;
    type Output = MisStatus;

    fn start(&mut self) -> Action<MisStatus> {
        Action::StayAwake
    }

    fn send(&mut self, round: Round) -> Outbox<MisMsg> {
        match (round - 1) % 3 {
            0 => {
                self.value = self.rng.gen_range(0..self.bound);
                Outbox::Broadcast(MisMsg::Rank(self.value))
            }
            1 => {
                let me = (self.value, self.id);
                if self.rivals.iter().all(|&r| r < me) {
                    self.status = MisStatus::InMis;
                    Outbox::Broadcast(MisMsg::Joined)
                } else {
                    Outbox::Silent
                }
            }
            _ if self.status == MisStatus::NotInMis => Outbox::Broadcast(MisMsg::Out),
            _ => Outbox::Silent,
        }
    }

    fn receive(&mut self, round: Round, inbox: &[Message<MisMsg>]) -> Action<MisStatus> {
        let done = Action::Terminate {
            output: self.status,
            at: round,
        };
        match (round - 1) % 3 {
            0 => {
                // Decided nodes have terminated, so every sender is undecided.
                self.rivals = inbox
                    .iter()
                    .filter_map(|m| match m.payload {
                        MisMsg::Rank(r) => Some((r, m.src)),
                        _ => None,
                    })
                    .collect();
                Action::StayAwake
            }
            1 => {
                if self.status == MisStatus::InMis {
                    return done;
                }
                if inbox.iter().any(|m| m.payload == MisMsg::Joined) {
                    self.status = MisStatus::NotInMis;
                }
                Action::StayAwake
            }
            _ => {
                if self.status == MisStatus::NotInMis {
                    done
                } else {
                    Action::StayAwake
                }
            }
        }
    }
}
