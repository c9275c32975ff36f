use thiserror::Error;

use crate::engine::Trace;
use crate::graph::NodeId;

/// Invalid configuration or parameter (bad family name, out-of-range value,
/// enumeration guard exceeded, ...).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ConfigError {
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            message: message.into(),
        }
    }
}

/// Edge-list parse failure. `line` is 1-based; 0 means the error is not tied
/// to a single line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("expected {expected} node programs, got {got}")]
    ProgramCount { expected: usize, got: usize },
    #[error("round {round}: node {src} sent {bits} bits to {dst}, budget is {budget}")]
    PayloadTooLarge {
        round: u64,
        src: NodeId,
        dst: NodeId,
        bits: u32,
        budget: u32,
    },
    #[error("round {round}: node {src} sent more than one message to {dst}")]
    DuplicateMessage { round: u64, src: NodeId, dst: NodeId },
    #[error("round {round}: node {src} addressed non-neighbor {dst}")]
    NotANeighbor { round: u64, src: NodeId, dst: NodeId },
    #[error("round {round}: node {node} asked to wake at round {target}")]
    BadWakeRound { round: u64, node: NodeId, target: u64 },
    #[error("run exceeded the round cap of {cap}")]
    Timeout { cap: u64, partial: Box<Trace> },
}
