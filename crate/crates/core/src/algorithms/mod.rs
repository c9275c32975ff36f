//! Node programs for the MIS algorithms and their shared vocabulary.

mod greedy;
mod luby;
mod recursive;
mod tape;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use greedy::{GreedyCore, GreedyProgram};
pub use luby::LubyProgram;
pub use recursive::{Leaf, RecursiveMis};
pub use tape::{BitTape, KRank};

use crate::engine::Payload;
use crate::error::ConfigError;
use crate::schedule::ceil_log2;

/// MIS membership of a node. Changes at most once, away from `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MisStatus {
    Unknown,
    #[serde(rename = "in")]
    InMis,
    #[serde(rename = "out")]
    NotInMis,
}

impl MisStatus {
    pub fn is_in(self) -> bool {
        self == MisStatus::InMis
    }
}

/// Wire messages of all four algorithms.
///
/// Every awake round has a fixed alphabet known to both ends from the
/// schedule, so a 2-bit tag always suffices; ranks add a fixed-width field
/// of `3 ceil(log2 n)` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisMsg {
    Presence,
    Status(MisStatus),
    Rank(u64),
    Joined,
    Out,
}

impl Payload for MisMsg {
    fn encoded_bits(&self, n: usize) -> u32 {
        match self {
            MisMsg::Rank(_) => 2 + 3 * ceil_log2(n),
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Full recursion with single-node base cases.
    Sleeping,
    /// Truncated recursion with greedy leaves.
    Fast,
    /// Distributed randomized greedy MIS on its own.
    Greedy,
    Luby,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Sleeping,
        Algorithm::Fast,
        Algorithm::Greedy,
        Algorithm::Luby,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sleeping => "sleeping",
            Algorithm::Fast => "fast",
            Algorithm::Greedy => "greedy",
            Algorithm::Luby => "luby",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                ConfigError::new(format!(
                    "unknown algorithm {s:?} (expected sleeping, fast, greedy or luby)"
                ))
            })
    }
}

pub const DEFAULT_GREEDY_C: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub algorithm: Algorithm,
    /// Overrides the recursion depth `K` of the recursive variants.
    pub depth: Option<u32>,
    /// Greedy window constant of the truncated variant.
    pub c: u32,
}

impl AlgoParams {
    pub fn new(algorithm: Algorithm) -> Self {
        AlgoParams {
            algorithm,
            depth: None,
            c: DEFAULT_GREEDY_C,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.c < 1 {
            return Err(ConfigError::new("greedy constant c must be >= 1"));
        }
        if let Some(k) = self.depth {
            if k > 62 {
                return Err(ConfigError::new(format!("recursion depth {k} exceeds 62")));
            }
        }
        Ok(())
    }
}

/// Position of a call in the recursion tree: the sequence of left/right
/// turns from the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CallPath {
    len: u8,
    /// Bit `i` set means turn `i` went right.
    turns: u64,
}

impl CallPath {
    pub const ROOT: CallPath = CallPath { len: 0, turns: 0 };

    pub fn left(self) -> CallPath {
        CallPath {
            len: self.len + 1,
            turns: self.turns,
        }
    }

    pub fn right(self) -> CallPath {
        CallPath {
            len: self.len + 1,
            turns: self.turns | (1 << self.len),
        }
    }

    pub fn depth(self) -> u32 {
        u32::from(self.len)
    }
}

impl fmt::Display for CallPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.turns >> i & 1 == 1 { "R" } else { "L" })?;
        }
        Ok(())
    }
}

/// One node's view of one recursive call it took part in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Participation {
    pub path: CallPath,
    pub k: u32,
    pub isolated_join: bool,
    pub went_left: bool,
    pub eliminated: bool,
    pub second_join: bool,
    pub went_right: bool,
}

/// Aggregate of one recursive call over all its participants `U`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CallRecord {
    /// `L`/`R` turns from the root; empty for the root call.
    pub path: String,
    pub k: u32,
    pub size_u: u64,
    pub size_l: u64,
    pub size_r: u64,
    pub isolated_joins: u64,
    pub eliminations: u64,
    pub second_detection_joins: u64,
}

/// Merges per-node participations into per-call records, in pre-order
/// (left subtree before right subtree).
pub fn aggregate_calls<'a>(parts: impl IntoIterator<Item = &'a Participation>) -> Vec<CallRecord> {
    let mut calls: BTreeMap<String, CallRecord> = BTreeMap::new();
    for p in parts {
        let rec = calls.entry(p.path.to_string()).or_insert_with(|| CallRecord {
            path: p.path.to_string(),
            k: p.k,
            ..CallRecord::default()
        });
        debug_assert_eq!(rec.k, p.k);
        rec.size_u += 1;
        rec.size_l += u64::from(p.went_left);
        rec.size_r += u64::from(p.went_right);
        rec.isolated_joins += u64::from(p.isolated_join);
        rec.eliminations += u64::from(p.eliminated);
        rec.second_detection_joins += u64::from(p.second_join);
    }
    calls.into_values().collect()
}

/// Converts "wake at `target`" into an engine action from round `now`.
pub(crate) fn wake_at<O>(now: crate::engine::Round, target: crate::engine::Round) -> crate::engine::Action<O> {
    if target == now + 1 {
        crate::engine::Action::StayAwake
    } else {
        crate::engine::Action::SleepUntil(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_sort_in_preorder() {
        let root = CallPath::ROOT;
        let mut names: Vec<String> = [
            root.right(),
            root.left().right(),
            root,
            root.left(),
            root.left().left(),
        ]
        .iter()
        .map(|p| p.to_string())
        .collect();
        names.sort();
        assert_eq!(names, vec!["", "L", "LL", "LR", "R"]);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bogus".parse::<Algorithm>().is_err());
    }

    #[test]
    fn message_sizes_fit_budget() {
        for n in [1usize, 2, 3, 255, 256, 4096, 1 << 20] {
            let budget = crate::engine::congest_budget(n);
            for m in [
                MisMsg::Presence,
                MisMsg::Status(MisStatus::Unknown),
                MisMsg::Rank(0),
                MisMsg::Joined,
                MisMsg::Out,
            ] {
                assert!(m.encoded_bits(n) <= budget);
            }
        }
        assert_eq!(MisMsg::Status(MisStatus::InMis).encoded_bits(1 << 20), 2);
    }
}
