//! Expansion of sweep templates such as `gnp:n=2^4..2^12,p=8/n`.
//!
//! A parameter value may be a single value, `a..b` (inclusive integer
//! range), `2^a..2^b` (powers of two), or a `|`-separated list of any of
//! these. `2^a` alone is also accepted. The template expands to the
//! cartesian product, varying the last parameter fastest.

use std::ops::RangeInclusive;

use sleepmis_core::{ConfigError, Family};

/// One concrete graph family produced by a template.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    /// Concrete spec text, e.g. `gnp:n=16,p=8/n`.
    pub spec: String,
    pub family: Family,
    /// Family name with every parameter except `n`, e.g. `gnp:p=8/n`.
    pub label: String,
}

pub fn expand_template(template: &str) -> Result<Vec<Instance>, ConfigError> {
    let template = template.trim();
    let (name, rest) = template.split_once(':').unwrap_or((template, ""));
    if name == "file" {
        let family: Family = template.parse()?;
        return Ok(vec![Instance {
            spec: template.to_string(),
            family,
            label: template.to_string(),
        }]);
    }
    let mut keys = Vec::new();
    let mut choices = Vec::new();
    for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("expected key=value, got {kv:?}")))?;
        keys.push(k.trim().to_string());
        choices.push(expand_value(v.trim())?);
    }
    let mut out = Vec::new();
    let mut index = vec![0usize; keys.len()];
    loop {
        let params: Vec<String> = keys
            .iter()
            .zip(&choices)
            .zip(&index)
            .map(|((k, vs), &i)| format!("{k}={}", vs[i]))
            .collect();
        let spec = if params.is_empty() {
            name.to_string()
        } else {
            format!("{name}:{}", params.join(","))
        };
        let family: Family = spec.parse()?;
        let others: Vec<&String> = params.iter().filter(|p| !p.starts_with("n=")).collect();
        let label = if others.is_empty() {
            name.to_string()
        } else {
            let joined: Vec<&str> = others.iter().map(|s| s.as_str()).collect();
            format!("{name}:{}", joined.join(","))
        };
        out.push(Instance {
            spec,
            family,
            label,
        });
        // Odometer increment, last key fastest.
        let mut pos = keys.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < choices[pos].len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

fn expand_value(v: &str) -> Result<Vec<String>, ConfigError> {
    let mut values = Vec::new();
    for item in v.split('|') {
        let item = item.trim();
        if item.is_empty() {
            return Err(ConfigError::new(format!("empty item in {v:?}")));
        }
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (lo.trim(), hi.trim());
                match (power_of_two(lo)?, power_of_two(hi)?) {
                    (Some(a), Some(b)) => {
                        if a > b {
                            return Err(ConfigError::new(format!("empty range {item:?}")));
                        }
                        values.extend((a..=b).map(|e| (1u64 << e).to_string()));
                    }
                    (None, None) => {
                        let range = integer_range(lo, hi)?;
                        values.extend(range.map(|x| x.to_string()));
                    }
                    _ => {
                        return Err(ConfigError::new(format!(
                            "range {item:?} mixes a power of two with a plain integer"
                        )))
                    }
                }
            }
            None => match power_of_two(item)? {
                Some(e) => values.push((1u64 << e).to_string()),
                None => values.push(item.to_string()),
            },
        }
    }
    Ok(values)
}

/// `2^e` -> `Some(e)`; anything else -> `None`.
fn power_of_two(s: &str) -> Result<Option<u32>, ConfigError> {
    let Some(e) = s.strip_prefix("2^") else {
        return Ok(None);
    };
    let e: u32 = e
        .parse()
        .map_err(|_| ConfigError::new(format!("bad exponent in {s:?}")))?;
    if e > 40 {
        return Err(ConfigError::new(format!("{s} is too large")));
    }
    Ok(Some(e))
}

fn integer_range(lo: &str, hi: &str) -> Result<RangeInclusive<u64>, ConfigError> {
    let parse = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| ConfigError::new(format!("expected an integer, got {s:?}")))
    };
    let (a, b) = (parse(lo)?, parse(hi)?);
    if a > b {
        return Err(ConfigError::new(format!("empty range {lo}..{hi}")));
    }
    Ok(a..=b)
}

/// Seeds as `a..b` (inclusive) or a single integer.
pub fn parse_seeds(s: &str) -> Result<RangeInclusive<u64>, ConfigError> {
    let s = s.trim();
    match s.split_once("..") {
        Some((lo, hi)) => integer_range(lo.trim(), hi.trim()),
        None => {
            let x = s
                .parse::<u64>()
                .map_err(|_| ConfigError::new(format!("expected a seed or a..b, got {s:?}")))?;
            Ok(x..=x)
        }
    }
}
