//! Recursion depths and the fixed sleep schedules. All logarithms are base 2.

use crate::engine::Round;

/// `1 / log2(4/3)`, the depth multiplier of the truncated recursion.
pub const ELL: f64 = std::f64::consts::LN_2 / 0.287_682_072_451_780_9; // ln(4/3)

/// Smallest `b` with `2^b >= n`; 0 for `n <= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// `K = ceil(3 log2 n)`, computed exactly as the smallest `K` with `2^K >= n^3`.
pub fn sleeping_depth(n: usize) -> u32 {
    let cube = (n as u128).pow(3);
    if cube <= 1 {
        0
    } else {
        u128::BITS - (cube - 1).leading_zeros()
    }
}

/// `K = max(1, ceil(ELL * log2 log2 n))`, clamped to 1 for `n < 4`.
pub fn fast_depth(n: usize) -> u32 {
    if n < 4 {
        return 1;
    }
    let loglog = (n as f64).log2().log2();
    ((ELL * loglog).ceil() as u32).max(1)
}

/// Duration of a level-`k` call of the full recursion: `3 (2^k - 1)`.
pub fn t_schedule(k: u32) -> Round {
    3 * ((1u64 << k) - 1)
}

/// Duration of a level-`k` call of the truncated recursion whose leaves run
/// greedy for `c * ceil(log2 n)` rounds: `2^k (c ceil(log2 n) + 3) - 3`.
pub fn fast_schedule(k: u32, n: usize, c: u32) -> Round {
    let leaf = greedy_window(n, c);
    (1u64 << k) * (leaf + 3) - 3
}

/// Length of a leaf greedy window: `c * ceil(log2 n)` rounds.
pub fn greedy_window(n: usize, c: u32) -> Round {
    u64::from(c) * u64::from(ceil_log2(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_value() {
        assert!((ELL - 1.0 / (4.0f64 / 3.0).log2()).abs() < 1e-12);
        assert!((ELL - 2.4094).abs() < 1e-4);
    }

    #[test]
    fn t_schedule_values() {
        assert_eq!(t_schedule(0), 0);
        assert_eq!(t_schedule(1), 3);
        assert_eq!(t_schedule(5), 93);
    }

    #[test]
    fn t_schedule_recurrence() {
        for k in 1..40 {
            assert_eq!(t_schedule(k), 2 * t_schedule(k - 1) + 3);
        }
    }

    #[test]
    fn fast_schedule_values() {
        for n in [2, 5, 256, 4096] {
            assert_eq!(fast_schedule(0, n, 6), 6 * u64::from(ceil_log2(n)));
        }
        // 2 * (6 * 8 + 3) - 3, unrolled by hand.
        assert_eq!(fast_schedule(1, 256, 6), 99);
    }

    #[test]
    fn fast_schedule_recurrence() {
        for n in [2, 64, 1000, 1 << 14] {
            for c in [1, 6, 10] {
                for k in 1..=20 {
                    assert_eq!(fast_schedule(k, n, c), 2 * fast_schedule(k - 1, n, c) + 3);
                }
            }
        }
    }

    #[test]
    fn depths() {
        assert_eq!(sleeping_depth(1), 0);
        assert_eq!(sleeping_depth(2), 3);
        assert_eq!(sleeping_depth(3), 5); // 27 <= 32
        assert_eq!(sleeping_depth(64), 18);
        assert_eq!(sleeping_depth(255), 24);
        assert_eq!(sleeping_depth(256), 24);
        assert_eq!(sleeping_depth(1024), 30);
        for n in 2..2000usize {
            let k = sleeping_depth(n);
            assert_eq!(k, (3.0 * (n as f64).log2()).ceil() as u32, "n={n}");
        }
    }

    #[test]
    fn fast_depths() {
        assert_eq!(fast_depth(1), 1);
        assert_eq!(fast_depth(3), 1);
        assert_eq!(fast_depth(1 << 16), 10);
        assert_eq!(fast_depth(64), 7);
        assert_eq!(fast_depth(1 << 10), 9);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(256), 8);
        assert_eq!(ceil_log2(257), 9);
    }
}
