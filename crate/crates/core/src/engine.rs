//! Synchronous round-based execution under sleeping-model semantics.
//!
//! Rounds are numbered from 1. In every round each awake node first emits
//! its outgoing messages, then receives the messages its awake neighbors sent
//! to it in that same round. Messages addressed to a sleeping or terminated
//! node are dropped. A node's awake count grows only in rounds where it is
//! activated; the clock skips stretches where nobody is awake, but those
//! rounds still count toward the total.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::CallRecord;
use crate::error::EngineError;
use crate::graph::{Graph, NodeId};
use crate::schedule::ceil_log2;

pub type Round = u64;

/// Default round cap, comfortably above the full Algorithm-1 schedule for
/// a few thousand nodes.
pub const DEFAULT_ROUND_CAP: Round = 1 << 40;

/// Per-message bit budget: a status tag plus a rank in `[0, n^3)`.
pub fn congest_budget(n: usize) -> u32 {
    3 * ceil_log2(n) + 8
}

/// Wire size of a message payload, in bits, for an `n`-node network. The
/// sender ID travels in the header and is not counted.
pub trait Payload: Clone {
    fn encoded_bits(&self, n: usize) -> u32;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message<M> {
    pub src: NodeId,
    pub dst: NodeId,
    pub payload: M,
}

/// What an awake node puts on the wire in the current round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outbox<M> {
    Silent,
    /// The same payload on every incident edge.
    Broadcast(M),
    /// At most one message per neighbor.
    Unicast(Vec<(NodeId, M)>),
}

/// Decision a node takes at the end of an awake round (or before round 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action<O> {
    /// Awake again in the next round.
    StayAwake,
    /// Sleep; next awake round is the given absolute round.
    SleepUntil(Round),
    /// Finished with `output`. The node sleeps until round `at` (no earlier
    /// than the current round) and counts as running until then.
    Terminate { output: O, at: Round },
}

/// Per-node state machine driven by the engine.
pub trait NodeProgram {
    type Msg: Payload;
    type Output: Clone;

    /// Called once before round 1; the current round is 0.
    fn start(&mut self) -> Action<Self::Output>;

    /// Send phase of an awake round.
    fn send(&mut self, round: Round) -> Outbox<Self::Msg>;

    /// Receive phase of the same round. `inbox` is sorted by sender ID.
    fn receive(&mut self, round: Round, inbox: &[Message<Self::Msg>]) -> Action<Self::Output>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepping {
    /// Jump straight to the next round in which some node is awake.
    #[default]
    FastForward,
    /// Visit every round and scan all nodes. Reference mode for small runs.
    EveryRound,
}

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub round_cap: Round,
    pub stepping: Stepping,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            round_cap: DEFAULT_ROUND_CAP,
            stepping: Stepping::FastForward,
        }
    }
}

/// Accounting for one run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub awake_rounds: Vec<u64>,
    /// Last round in which the node was awake; 0 if never.
    pub last_awake: Vec<Round>,
    /// Round at which the node terminated.
    pub finish_round: Vec<Round>,
    /// Final clock value: the largest finish round.
    pub total_rounds: Round,
    pub messages_sent: u64,
    pub messages_delivered: u64,
    pub messages_dropped: u64,
    /// Filled in by algorithm instrumentation after the run.
    pub call_records: Vec<CallRecord>,
}

/// Result of a completed run. Programs are handed back so callers can read
/// instrumentation out of them.
#[derive(Debug)]
pub struct Execution<P: NodeProgram> {
    pub programs: Vec<P>,
    pub outputs: Vec<P::Output>,
    pub trace: Trace,
}

pub fn run<P: NodeProgram>(
    graph: &Graph,
    programs: Vec<P>,
    config: EngineConfig,
) -> Result<Execution<P>, EngineError> {
    if programs.len() != graph.n() {
        return Err(EngineError::ProgramCount {
            expected: graph.n(),
            got: programs.len(),
        });
    }
    let mut sim = Sim::new(graph, programs, config);
    sim.start()?;
    match config.stepping {
        Stepping::FastForward => sim.run_fast_forward()?,
        Stepping::EveryRound => sim.run_every_round()?,
    }
    Ok(sim.finish())
}

const NEVER: Round = Round::MAX;

struct Sim<'g, P: NodeProgram> {
    graph: &'g Graph,
    budget: u32,
    config: EngineConfig,
    programs: Vec<P>,
    /// Next awake round, or `None` once terminated.
    wake: Vec<Option<Round>>,
    queue: BTreeMap<Round, Vec<NodeId>>,
    alive: usize,
    /// Round in which the node was last activated.
    stamp: Vec<Round>,
    outboxes: Vec<Outbox<P::Msg>>,
    outputs: Vec<Option<P::Output>>,
    trace: Trace,
    clock: Round,
}

impl<'g, P: NodeProgram> Sim<'g, P> {
    fn new(graph: &'g Graph, programs: Vec<P>, config: EngineConfig) -> Self {
        let n = graph.n();
        Sim {
            graph,
            budget: congest_budget(n),
            config,
            programs,
            wake: vec![None; n],
            queue: BTreeMap::new(),
            alive: n,
            stamp: vec![NEVER; n],
            outboxes: (0..n).map(|_| Outbox::Silent).collect(),
            outputs: vec![None; n],
            trace: Trace {
                awake_rounds: vec![0; n],
                last_awake: vec![0; n],
                finish_round: vec![0; n],
                ..Trace::default()
            },
            clock: 0,
        }
    }

    fn start(&mut self) -> Result<(), EngineError> {
        for v in 0..self.graph.n() {
            let action = self.programs[v].start();
            self.apply(v as NodeId, 0, action)?;
        }
        Ok(())
    }

    fn apply(&mut self, v: NodeId, now: Round, action: Action<P::Output>) -> Result<(), EngineError> {
        let target = match action {
            Action::StayAwake => now + 1,
            Action::SleepUntil(r) => r,
            Action::Terminate { output, at } => {
                if at < now {
                    return Err(EngineError::BadWakeRound {
                        round: now,
                        node: v,
                        target: at,
                    });
                }
                if at > self.config.round_cap {
                    return Err(self.timeout());
                }
                self.outputs[v as usize] = Some(output);
                self.trace.finish_round[v as usize] = at;
                self.wake[v as usize] = None;
                self.alive -= 1;
                return Ok(());
            }
        };
        if target <= now {
            return Err(EngineError::BadWakeRound {
                round: now,
                node: v,
                target,
            });
        }
        if target > self.config.round_cap {
            return Err(self.timeout());
        }
        self.wake[v as usize] = Some(target);
        if self.config.stepping == Stepping::FastForward {
            self.queue.entry(target).or_default().push(v);
        }
        Ok(())
    }

    fn timeout(&self) -> EngineError {
        let mut partial = self.trace.clone();
        partial.total_rounds = self.clock;
        EngineError::Timeout {
            cap: self.config.round_cap,
            partial: Box::new(partial),
        }
    }

    fn run_fast_forward(&mut self) -> Result<(), EngineError> {
        let mut inbox = Vec::new();
        while let Some((round, mut awake)) = self.queue.pop_first() {
            awake.sort_unstable();
            self.clock = round;
            self.activate_and_send(round, &awake)?;
            for &v in &awake {
                self.collect_inbox(round, v, &awake, &mut inbox);
                self.trace.messages_delivered += inbox.len() as u64;
                let action = self.programs[v as usize].receive(round, &inbox);
                self.apply(v, round, action)?;
            }
            self.clear_outboxes(&awake);
        }
        self.trace.messages_dropped = self.trace.messages_sent - self.trace.messages_delivered;
        Ok(())
    }

    /// Reference loop: visits every round, finds awake nodes by scanning,
    /// and delivers sender-side with explicit drop counting.
    fn run_every_round(&mut self) -> Result<(), EngineError> {
        let n = self.graph.n();
        let mut inboxes: Vec<Vec<Message<P::Msg>>> = vec![Vec::new(); n];
        let mut round: Round = 0;
        while self.alive > 0 {
            round += 1;
            self.clock = round;
            let awake: Vec<NodeId> = (0..n as NodeId)
                .filter(|&v| self.wake[v as usize] == Some(round))
                .collect();
            if awake.is_empty() {
                continue;
            }
            self.activate_and_send(round, &awake)?;
            for &u in &awake {
                let targets: Vec<(NodeId, P::Msg)> = match &self.outboxes[u as usize] {
                    Outbox::Silent => Vec::new(),
                    Outbox::Broadcast(m) => self
                        .graph
                        .neighbors(u)
                        .iter()
                        .map(|&w| (w, m.clone()))
                        .collect(),
                    Outbox::Unicast(list) => list.clone(),
                };
                for (w, payload) in targets {
                    if self.stamp[w as usize] == round {
                        inboxes[w as usize].push(Message { src: u, dst: w, payload });
                        self.trace.messages_delivered += 1;
                    } else {
                        self.trace.messages_dropped += 1;
                    }
                }
            }
            for &v in &awake {
                let inbox = std::mem::take(&mut inboxes[v as usize]);
                let action = self.programs[v as usize].receive(round, &inbox);
                self.apply(v, round, action)?;
            }
            self.clear_outboxes(&awake);
        }
        Ok(())
    }

    fn activate_and_send(&mut self, round: Round, awake: &[NodeId]) -> Result<(), EngineError> {
        for &v in awake {
            let i = v as usize;
            self.stamp[i] = round;
            self.trace.awake_rounds[i] += 1;
            self.trace.last_awake[i] = round;
        }
        for &v in awake {
            let mut outbox = self.programs[v as usize].send(round);
            self.trace.messages_sent += self.check_outbox(round, v, &mut outbox)?;
            self.outboxes[v as usize] = outbox;
        }
        Ok(())
    }

    /// Enforces the bandwidth rules and returns the number of messages.
    /// Unicast lists are sorted by destination as a side effect.
    fn check_outbox(&self, round: Round, src: NodeId, outbox: &mut Outbox<P::Msg>) -> Result<u64, EngineError> {
        let n = self.graph.n();
        let over_budget = |dst: NodeId, m: &P::Msg| {
            let bits = m.encoded_bits(n);
            (bits > self.budget).then_some(EngineError::PayloadTooLarge {
                round,
                src,
                dst,
                bits,
                budget: self.budget,
            })
        };
        match outbox {
            Outbox::Silent => Ok(0),
            Outbox::Broadcast(m) => {
                let nbrs = self.graph.neighbors(src);
                if let Some(&dst) = nbrs.first() {
                    if let Some(e) = over_budget(dst, m) {
                        return Err(e);
                    }
                }
                Ok(nbrs.len() as u64)
            }
            Outbox::Unicast(list) => {
                list.sort_by_key(|(dst, _)| *dst);
                for (i, (dst, m)) in list.iter().enumerate() {
                    if i > 0 && list[i - 1].0 == *dst {
                        return Err(EngineError::DuplicateMessage { round, src, dst: *dst });
                    }
                    if (*dst as usize) >= n || !self.graph.has_edge(src, *dst) {
                        return Err(EngineError::NotANeighbor { round, src, dst: *dst });
                    }
                    if let Some(e) = over_budget(*dst, m) {
                        return Err(e);
                    }
                }
                Ok(list.len() as u64)
            }
        }
    }

    /// Gathers, in sender order, the messages awake neighbors sent to `v`.
    fn collect_inbox(&self, round: Round, v: NodeId, awake: &[NodeId], inbox: &mut Vec<Message<P::Msg>>) {
        inbox.clear();
        let adjacency = self.graph.neighbors(v);
        let mut take = |u: NodeId| match &self.outboxes[u as usize] {
            Outbox::Silent => {}
            Outbox::Broadcast(m) => inbox.push(Message {
                src: u,
                dst: v,
                payload: m.clone(),
            }),
            Outbox::Unicast(list) => {
                if let Ok(i) = list.binary_search_by_key(&v, |(dst, _)| *dst) {
                    inbox.push(Message {
                        src: u,
                        dst: v,
                        payload: list[i].1.clone(),
                    });
                }
            }
        };
        // Scan whichever side is cheaper: the awake set (with adjacency
        // lookups) or the full neighbor list (with awake checks).
        if awake.len().saturating_mul(16) < adjacency.len() {
            for &u in awake {
                if u != v && adjacency.binary_search(&u).is_ok() {
                    take(u);
                }
            }
        } else {
            for &u in adjacency {
                if self.stamp[u as usize] == round {
                    take(u);
                }
            }
        }
    }

    fn clear_outboxes(&mut self, awake: &[NodeId]) {
        for &v in awake {
            self.outboxes[v as usize] = Outbox::Silent;
        }
    }

    fn finish(mut self) -> Execution<P> {
        self.trace.total_rounds = self.trace.finish_round.iter().copied().max().unwrap_or(0);
        let outputs = self
            .outputs
            .into_iter()
            .map(|o| o.expect("every node terminated"))
            .collect();
        Execution {
            programs: self.programs,
            outputs,
            trace: self.trace,
        }
    }
}
