use std::cmp::Ordering;
use std::fmt;

use rand::RngCore;

use crate::error::ConfigError;
use crate::graph::NodeId;
use crate::rng::{derive_rng, StreamTag};

/// The random bits `X_1..X_K` of one node. Bit `i` (1-based) is stored at
/// position `i - 1`, so the integer value orders tapes by `X_K` first.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitTape {
    bits: u64,
    len: u32,
}

impl BitTape {
    /// Draws `len` fair bits from the node's tape stream.
    pub fn generate(seed: u64, node: NodeId, len: u32) -> Self {
        assert!(len <= 64, "tapes hold at most 64 bits");
        let mut rng = derive_rng(seed, node, StreamTag::Tape);
        let mut bits = 0u64;
        for i in 0..len {
            bits |= u64::from(rng.next_u32() & 1) << i;
        }
        BitTape { bits, len }
    }

    /// Tape from explicit bits, `x[0]` being `X_1`.
    pub fn from_bits(x: &[bool]) -> Self {
        assert!(x.len() <= 64);
        let bits = x
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        BitTape {
            bits,
            len: x.len() as u32,
        }
    }

    /// Tape whose bit `i` is bit `i - 1` of `value`.
    pub fn from_value(value: u64, len: u32) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        BitTape {
            bits: value & mask,
            len,
        }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `X_i`, 1-based.
    pub fn bit(&self, i: u32) -> bool {
        assert!(i >= 1 && i <= self.len, "bit index {i} outside 1..={}", self.len);
        self.bits >> (i - 1) & 1 == 1
    }

    /// Integer whose binary digits, most significant first, are `X_K..X_1`.
    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn k_rank(&self, k: u32) -> Result<KRank, ConfigError> {
        if k > self.len {
            return Err(ConfigError::new(format!(
                "rank level {k} exceeds tape length {}",
                self.len
            )));
        }
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Ok(KRank {
            bits: self.bits & mask,
            k,
        })
    }
}

impl fmt::Debug for BitTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitTape(")?;
        for i in (1..=self.len).rev() {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        write!(f, ")")
    }
}

/// The sequence `(X_k, X_{k-1}, ..., X_1, -1)`, ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KRank {
    bits: u64,
    k: u32,
}

impl KRank {
    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn elements(&self) -> impl Iterator<Item = i8> + '_ {
        (1..=self.k)
            .rev()
            .map(move |i| (self.bits >> (i - 1) & 1) as i8)
            .chain(std::iter::once(-1))
    }
}

impl Ord for KRank {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.k == other.k {
            self.bits.cmp(&other.bits)
        } else {
            self.elements().cmp(other.elements())
        }
    }
}

impl PartialOrd for KRank {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn zero_rank_is_the_sentinel() {
        let t = BitTape::from_bits(&[true, false, true]);
        assert_eq!(t.k_rank(0).unwrap().elements().collect::<Vec<_>>(), vec![-1]);
    }

    #[test]
    fn unrolled_rank() {
        // X_1 = 0, X_2 = 1.
        let t = BitTape::from_bits(&[false, true]);
        assert_eq!(t.k_rank(2).unwrap().elements().collect::<Vec<_>>(), vec![1, 0, -1]);
    }

    #[test]
    fn lexicographic_order() {
        let a = BitTape::from_bits(&[false, true]).k_rank(2).unwrap(); // (1,0,-1)
        let b = BitTape::from_bits(&[true, false]).k_rank(2).unwrap(); // (0,1,-1)
        assert!(a > b);
    }

    #[test]
    fn rank_beyond_tape_is_an_error() {
        assert!(BitTape::from_bits(&[true]).k_rank(2).is_err());
    }

    #[test]
    fn tapes_are_deterministic() {
        assert_eq!(BitTape::generate(9, 3, 21), BitTape::generate(9, 3, 21));
        assert_eq!(BitTape::generate(9, 3, 0).value(), 0);
    }

    #[test]
    fn tape_bits_are_roughly_fair() {
        let ones: u32 = (0..2000)
            .map(|v| BitTape::generate(1, v, 32).value().count_ones())
            .sum();
        // 64000 fair bits: mean 32000, sd ~126.
        assert!((ones as i64 - 32000).abs() < 600, "{ones}");
    }

    proptest! {
        #[test]
        fn same_level_order_matches_integer_order(a in any::<u64>(), b in any::<u64>(), k in 0u32..=64) {
            let ra = BitTape::from_value(a, 64).k_rank(k).unwrap();
            let rb = BitTape::from_value(b, 64).k_rank(k).unwrap();
            prop_assert_eq!(ra.cmp(&rb), ra.elements().cmp(rb.elements()));
        }

        #[test]
        fn prefix_extension_orders_like_sequences(a in any::<u64>(), ka in 0u32..8, kb in 0u32..8) {
            let t = BitTape::from_value(a, 8);
            let (ra, rb) = (t.k_rank(ka).unwrap(), t.k_rank(kb).unwrap());
            let (ea, eb): (Vec<i8>, Vec<i8>) = (ra.elements().collect(), rb.elements().collect());
            prop_assert_eq!(ra.cmp(&rb), ea.cmp(&eb));
        }
    }
}
