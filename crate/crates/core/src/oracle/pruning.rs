//! Sample statistics of the per-call participant counts across seeds.

use serde::{Deserialize, Serialize};

use crate::algorithms::CallRecord;
use crate::error::ConfigError;

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Estimate {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return Estimate { mean, se: 0.0 };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate {
            mean,
            se: (var / n).sqrt(),
        }
    }

    /// One-sided test: the mean does not exceed `bound` by more than
    /// `sigmas` standard errors.
    pub fn within(&self, bound: f64, sigmas: f64) -> bool {
        self.mean <= bound + sigmas * self.se
    }
}

/// `Z_{K-i}`: total participants over all calls at level `K - i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelStat {
    pub i: u32,
    pub k: u32,
    pub z: Estimate,
    /// Per seed, summed `|L|` over summed `|U|` at this level. Seeds where
    /// the level is empty are left out.
    pub left_fraction: Option<Estimate>,
    pub right_fraction: Option<Estimate>,
    /// `(3/4)^i n`.
    pub bound: f64,
    /// Mean exceeds the bound by more than 3 standard errors.
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruningReport {
    pub seeds: usize,
    pub n: u64,
    pub depth: u32,
    pub root_left: Estimate,
    pub root_right: Estimate,
    /// Root `|L| <= |U|/2` violated beyond 3 standard errors.
    pub left_violated: bool,
    /// Root `|R| <= |U|/4` violated beyond 3 standard errors.
    pub right_violated: bool,
    pub levels: Vec<LevelStat>,
}

impl PruningReport {
    /// Levels `i <= max_i` whose mean `Z_{K-i}` exceeds `slack * (3/4)^i n`.
    pub fn zdecay_violations(&self, slack: f64, max_i: u32) -> Vec<&LevelStat> {
        self.levels
            .iter()
            .filter(|l| l.i <= max_i && l.z.mean > slack * l.bound)
            .collect()
    }

    pub fn any_violation(&self) -> bool {
        self.left_violated || self.right_violated || self.levels.iter().any(|l| l.violated)
    }
}

/// Aggregates one record list per seed from runs on graphs with `n` nodes
/// and recursion depth `depth`.
pub fn pruning_stats(
    per_seed: &[Vec<CallRecord>],
    n: u64,
    depth: u32,
) -> Result<PruningReport, ConfigError> {
    if per_seed.len() < 2 {
        return Err(ConfigError::new("pruning statistics need at least 2 seeds"));
    }
    let root = |records: &Vec<CallRecord>| records.iter().find(|r| r.path.is_empty()).cloned();
    let mut left = Vec::with_capacity(per_seed.len());
    let mut right = Vec::with_capacity(per_seed.len());
    let mut size_u = Vec::with_capacity(per_seed.len());
    for records in per_seed {
        let r = root(records).ok_or_else(|| ConfigError::new("a seed has no root call record"))?;
        left.push(r.size_l as f64);
        right.push(r.size_r as f64);
        size_u.push(r.size_u as f64);
    }
    let mean_u = size_u.iter().sum::<f64>() / size_u.len() as f64;
    let root_left = Estimate::from_samples(&left);
    let root_right = Estimate::from_samples(&right);

    let levels = (0..=depth)
        .map(|i| {
            let k = depth - i;
            let samples: Vec<f64> = per_seed
                .iter()
                .map(|records| {
                    records
                        .iter()
                        .filter(|r| r.k == k)
                        .map(|r| r.size_u)
                        .sum::<u64>() as f64
                })
                .collect();
            let z = Estimate::from_samples(&samples);
            let mut left_frac = Vec::new();
            let mut right_frac = Vec::new();
            for records in per_seed {
                let (mut u, mut l, mut r) = (0u64, 0u64, 0u64);
                for rec in records.iter().filter(|r| r.k == k) {
                    u += rec.size_u;
                    l += rec.size_l;
                    r += rec.size_r;
                }
                if u > 0 {
                    left_frac.push(l as f64 / u as f64);
                    right_frac.push(r as f64 / u as f64);
                }
            }
            let fraction = |xs: &[f64]| (!xs.is_empty()).then(|| Estimate::from_samples(xs));
            let bound = 0.75f64.powi(i as i32) * n as f64;
            LevelStat {
                i,
                k,
                z,
                left_fraction: fraction(&left_frac),
                right_fraction: fraction(&right_frac),
                bound,
                violated: !z.within(bound, 3.0),
            }
        })
        .collect();

    Ok(PruningReport {
        seeds: per_seed.len(),
        n,
        depth,
        left_violated: !root_left.within(mean_u / 2.0, 3.0),
        right_violated: !root_right.within(mean_u / 4.0, 3.0),
        root_left,
        root_right,
        levels,
    })
}
