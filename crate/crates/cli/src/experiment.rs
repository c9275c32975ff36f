//! Parameter sweeps written as CSV, one row per (algorithm, graph, seed).
//!
//! Config files hold one `key = value` per line; `#` starts a comment.
//! Keys: `algo` (list separated by `,` or `|`), `graph` (a sweep template,
//! may repeat), `seeds` (`a..b` inclusive), `c`, `k`, `cap`, `out`,
//! `timing` (`true`/`false`) and `trace_dir`.

use std::fs::File;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use sleepmis_core::algorithms::DEFAULT_GREEDY_C;
use sleepmis_core::engine::{EngineConfig, DEFAULT_ROUND_CAP};
use sleepmis_core::{AlgoParams, Algorithm};

use crate::cell::{run_cell, CellResult, ResultRow, TraceDump};
use crate::error::CliError;
use crate::sweep::{expand_template, parse_seeds, Instance};
use crate::threads;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub graphs: Vec<String>,
    pub seeds: RangeInclusive<u64>,
    pub c: u32,
    pub depth: Option<u32>,
    pub cap: u64,
    pub out: PathBuf,
    pub timing: bool,
    pub trace_dir: Option<PathBuf>,
}

/// Partially specified config, from a file, from flags, or both.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOptions {
    pub algorithms: Option<Vec<Algorithm>>,
    pub graphs: Vec<String>,
    pub seeds: Option<RangeInclusive<u64>>,
    pub c: Option<u32>,
    pub depth: Option<u32>,
    pub cap: Option<u64>,
    pub out: Option<PathBuf>,
    pub timing: Option<bool>,
    pub trace_dir: Option<PathBuf>,
}

pub fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>, CliError> {
    let algos = s
        .split([',', '|'])
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| a.parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()?;
    if algos.is_empty() {
        return Err(CliError::usage("no algorithm given"));
    }
    Ok(algos)
}

impl ExperimentOptions {
    pub fn parse_file(text: &str) -> Result<Self, CliError> {
        let mut opts = ExperimentOptions::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::usage(format!("config line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |v: &str| -> Result<u64, CliError> {
                v.parse()
                    .map_err(|_| bad(format!("{key} must be an integer, got {v:?}")))
            };
            match key {
                "algo" | "algorithms" => opts.algorithms = Some(parse_algorithms(value)?),
                "graph" => opts.graphs.push(value.to_string()),
                "seeds" => opts.seeds = Some(parse_seeds(value)?),
                "c" => opts.c = Some(number(value)? as u32),
                "k" => opts.depth = Some(number(value)? as u32),
                "cap" => opts.cap = Some(number(value)?),
                "out" => opts.out = Some(PathBuf::from(value)),
                "timing" => {
                    opts.timing = Some(
                        value
                            .parse()
                            .map_err(|_| bad(format!("timing must be true or false, got {value:?}")))?,
                    )
                }
                "trace_dir" => opts.trace_dir = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(opts)
    }

    /// Values set in `over` win; its graph list replaces ours if non-empty.
    pub fn overlay(self, over: ExperimentOptions) -> ExperimentOptions {
        ExperimentOptions {
            algorithms: over.algorithms.or(self.algorithms),
            graphs: if over.graphs.is_empty() {
                self.graphs
            } else {
                over.graphs
            },
            seeds: over.seeds.or(self.seeds),
            c: over.c.or(self.c),
            depth: over.depth.or(self.depth),
            cap: over.cap.or(self.cap),
            out: over.out.or(self.out),
            timing: over.timing.or(self.timing),
            trace_dir: over.trace_dir.or(self.trace_dir),
        }
    }

    pub fn finish(self) -> Result<ExperimentConfig, CliError> {
        let algorithms = self
            .algorithms
            .ok_or_else(|| CliError::usage("experiment needs at least one algorithm (--algo)"))?;
        if self.graphs.is_empty() {
            return Err(CliError::usage("experiment needs at least one graph (--graph)"));
        }
        let seeds = self
            .seeds
            .ok_or_else(|| CliError::usage("experiment needs a seed range (--seeds a..b)"))?;
        let config = ExperimentConfig {
            algorithms,
            graphs: self.graphs,
            seeds,
            c: self.c.unwrap_or(DEFAULT_GREEDY_C),
            depth: self.depth,
            cap: self.cap.unwrap_or(DEFAULT_ROUND_CAP),
            out: self
                .out
                .ok_or_else(|| CliError::usage("experiment needs an output path (--out)"))?,
            timing: self.timing.unwrap_or(false),
            trace_dir: self.trace_dir,
        };
        for &a in &config.algorithms {
            config.params(a).validate()?;
        }
        Ok(config)
    }
}

impl ExperimentConfig {
    pub fn params(&self, algorithm: Algorithm) -> AlgoParams {
        AlgoParams {
            algorithm,
            depth: self.depth,
            c: self.c,
        }
    }

    /// The settings that determine the CSV contents, one per line. Output
    /// locations and timing are left out.
    pub fn canonical_lines(&self) -> Vec<String> {
        let algos: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        let mut lines = vec![format!("algo={}", algos.join(","))];
        lines.extend(self.graphs.iter().map(|g| format!("graph={g}")));
        lines.push(format!("seeds={}..{}", self.seeds.start(), self.seeds.end()));
        lines.push(format!("c={}", self.c));
        lines.push(format!(
            "k={}",
            self.depth.map_or_else(|| "auto".to_string(), |k| k.to_string())
        ));
        lines.push(format!("cap={}", self.cap));
        lines
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_lines().join("\n").as_bytes())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    config: Vec<String>,
    rows: usize,
    csv_sha256: String,
    csv: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSummary {
    pub rows: usize,
    pub timeouts: usize,
    pub invalid: usize,
    pub manifest: PathBuf,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary, CliError> {
    let mut instances: Vec<Instance> = Vec::new();
    for g in &config.graphs {
        instances.extend(expand_template(g)?);
    }
    if let Some(dir) = &config.trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    // Fail on an unwritable path before spending time on the sweep.
    let mut file = File::create(&config.out).map_err(|e| CliError::io(&config.out, e))?;

    let cells: Vec<(Algorithm, &Instance, u64)> = config
        .algorithms
        .iter()
        .flat_map(|&a| {
            instances
                .iter()
                .flat_map(move |inst| config.seeds.clone().map(move |s| (a, inst, s)))
        })
        .collect();
    let engine = EngineConfig {
        round_cap: config.cap,
        ..EngineConfig::default()
    };
    let pool = threads::pool()?;
    let mut rows: Vec<ResultRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(algo, inst, seed)| {
                let params = config.params(algo);
                let cell = run_cell(&inst.family, &params, seed, engine)?;
                if let (Some(dir), CellResult::Done { outcome, metrics }) =
                    (&config.trace_dir, &cell.result)
                {
                    let path = dir.join(trace_file_name(algo, &inst.spec, seed));
                    TraceDump::new(&inst.spec, &params, outcome, metrics).write(&path)?;
                }
                Ok(ResultRow::new(&params, &inst.label, seed, &cell, config.timing))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    // Stable: rows with equal keys keep their cell order.
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in &rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::io(&config.out, e.into_error()))?;
    file.write_all(&bytes)
        .map_err(|e| CliError::io(&config.out, e))?;

    let manifest_path = manifest_path(&config.out);
    let csv_name = config.out.file_name().and_then(|s| s.to_str()).unwrap_or("");
    let manifest = Manifest {
        tool: "sleepmis",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config.hash(),
        config: config.canonical_lines(),
        rows: rows.len(),
        csv_sha256: sha256_hex(&bytes),
        csv: csv_name,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|source| CliError::Json {
        path: manifest_path.clone(),
        source,
    })?;
    text.push('\n');
    std::fs::write(&manifest_path, text).map_err(|e| CliError::io(&manifest_path, e))?;

    Ok(ExperimentSummary {
        rows: rows.len(),
        timeouts: rows.iter().filter(|r| r.verdict == "timeout").count(),
        invalid: rows
            .iter()
            .filter(|r| r.verdict != "timeout" && r.verdict != "valid")
            .count(),
        manifest: manifest_path,
    })
}

/// File name for a trace dump; characters outside `[A-Za-z0-9._-]` become `_`.
pub fn trace_file_name(algo: Algorithm, spec: &str, seed: u64) -> String {
    let clean: String = spec
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect();
    format!("{}_{clean}_{seed}.json", algo.name())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip() {
        let text = "# sweep\nalgo = sleeping, fast\ngraph = cycle:n=2^4..2^5\ngraph = star:n=8\nseeds = 0..9\nc = 4\nout = r.csv\n";
        let cfg = ExperimentOptions::parse_file(text).unwrap().finish().unwrap();
        assert_eq!(cfg.algorithms, vec![Algorithm::Sleeping, Algorithm::Fast]);
        assert_eq!(cfg.graphs.len(), 2);
        assert_eq!(cfg.seeds, 0..=9);
        assert_eq!(cfg.c, 4);
        assert_eq!(cfg.cap, DEFAULT_ROUND_CAP);
    }

    #[test]
    fn flags_override_file() {
        let file = ExperimentOptions::parse_file("algo=luby\ngraph=path:n=4\nseeds=0..1\nout=a.csv").unwrap();
        let flags = ExperimentOptions {
            seeds: Some(5..=6),
            ..ExperimentOptions::default()
        };
        let cfg = file.overlay(flags).finish().unwrap();
        assert_eq!(cfg.seeds, 5..=6);
        assert_eq!(cfg.algorithms, vec![Algorithm::Luby]);
    }

    #[test]
    fn config_errors_name_the_line() {
        let err = ExperimentOptions::parse_file("algo=luby\nbogus=1").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(ExperimentOptions::parse_file("algo=quantum").is_err());
        assert!(ExperimentOptions::default().finish().is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let base = "algo=greedy\ngraph=path:n=4\nseeds=0..3\n";
        let a = ExperimentOptions::parse_file(&format!("{base}out=x.csv")).unwrap().finish().unwrap();
        let b = ExperimentOptions::parse_file(&format!("{base}out=y.csv")).unwrap().finish().unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn trace_names_are_filesystem_safe() {
        assert_eq!(
            trace_file_name(Algorithm::Fast, "gnp:n=8,p=8/n", 3),
            "fast_gnp_n_8_p_8_n_3.json"
        );
    }
}
