//! Per-node random streams.
//!
//! Every random quantity in a run is drawn from a stream identified by
//! `(seed, node, tag)`. The triple is laid out verbatim as the 32-byte ChaCha8
//! key, so distinct triples give unrelated streams and the output does not
//! depend on platform or evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::NodeId;

/// Purpose of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamTag {
    /// Recursion bits `X_1..X_K`.
    Tape,
    /// Rank for the randomized greedy MIS.
    Rank,
    /// Per-phase values for Luby's algorithm.
    Luby,
    /// Graph generation.
    Graph,
}

impl StreamTag {
    fn code(self) -> u64 {
        match self {
            StreamTag::Tape => 0x7461_7065,
            StreamTag::Rank => 0x7261_6e6b,
            StreamTag::Luby => 0x6c75_6279,
            StreamTag::Graph => 0x6772_6170,
        }
    }
}

pub fn derive_rng(seed: u64, node: NodeId, tag: StreamTag) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&u64::from(node).to_le_bytes());
    key[16..24].copy_from_slice(&tag.code().to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::RngCore;

    use super::*;

    #[test]
    fn same_triple_same_stream() {
        let mut a = derive_rng(42, 7, StreamTag::Tape);
        let mut b = derive_rng(42, 7, StreamTag::Tape);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn first_draws_are_pairwise_distinct_across_nodes_seeds_and_tags() {
        // A collision among 10^4 64-bit draws has probability ~2^-38, so any
        // repeat means the key layout aliases two triples.
        let mut seen = HashSet::new();
        for node in 0..10_000 {
            assert!(seen.insert(derive_rng(5, node, StreamTag::Tape).next_u64()));
        }
        for seed in 0..10_000u64 {
            assert!(seen.insert(derive_rng(seed + 6, 0, StreamTag::Tape).next_u64()));
        }
        for tag in [StreamTag::Rank, StreamTag::Luby, StreamTag::Graph] {
            assert!(seen.insert(derive_rng(5, 0, tag).next_u64()));
        }
    }

    #[test]
    fn known_answer() {
        // Pins the stream so a dependency bump that changes ChaCha output
        // (and with it every frozen experiment) is caught here. Expected
        // values come from a separate ChaCha8 block function over the same
        // key layout: words 0 and 1 of block 0, little-endian.
        assert_eq!(derive_rng(0, 0, StreamTag::Tape).next_u64(), 0xd534_e08f_aca6_92f0);
        assert_eq!(derive_rng(42, 7, StreamTag::Rank).next_u64(), 0x27d3_a950_7f39_c7da);
    }
}
