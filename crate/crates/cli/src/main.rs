use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sleepmis_core::engine::{EngineConfig, DEFAULT_ROUND_CAP};
use sleepmis_core::{AlgoParams, Algorithm};

use sleepmis_cli::cell::{recheck, run_cell, CellResult, ResultRow, TraceDump};
use sleepmis_cli::experiment::{parse_algorithms, run_experiment, ExperimentOptions};
use sleepmis_cli::sweep::{expand_template, parse_seeds};
use sleepmis_cli::verify::{parse_checks, run_verify, summary, VerifyConfig};
use sleepmis_cli::CliError;

const GRAPH_HELP: &str = "\
Graph specs use `family:key=val,...`:
  gnp:n=256,p=0.05     G(n, p); p may be written X/n, e.g. p=8/n
  cycle:n=64           n >= 3
  path:n=64 | complete:n=64 | star:n=64 | tree:n=255 (uniform random tree)
  grid:rows=8,cols=8
  file:path/to.edges   edge list: `u v` per line, optional `# n=<count>` header
Random families are generated with the run seed.

In `experiment`, any value may be a sweep: `a..b` (inclusive), `2^a..2^b`
(powers of two) or `x|y|z`, e.g. gnp:n=2^4..2^12,p=8/n.

Exit codes: 0 success / valid MIS, 2 invalid MIS or failed check,
1 usage or engine error. SLEEPMIS_THREADS caps the worker count.";

#[derive(Parser)]
#[command(name = "sleepmis", version, about = "Sleeping-model MIS simulator", after_help = GRAPH_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its metrics as JSON.
    Run(RunArgs),
    /// Sweep algorithms, graphs and seeds into a CSV file.
    Experiment(ExperimentArgs),
    /// Check outputs and statistics over a seed range.
    Verify(VerifyArgs),
    /// Re-validate a trace file written by `run --emit-trace`.
    Recheck(RecheckArgs),
}

#[derive(Args)]
struct AlgoFlags {
    /// Leaf greedy window constant for the fast variant.
    #[arg(long)]
    c: Option<u32>,
    /// Recursion depth override.
    #[arg(long)]
    k: Option<u32>,
    /// Round cap; runs that reach it are timeouts.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algo: Algorithm,
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full trace as JSON.
    #[arg(long)]
    emit_trace: Option<PathBuf>,
    /// Report wall-clock time in runtime_ms.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    flags: AlgoFlags,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Algorithms, separated by `,` or `|`.
    #[arg(long)]
    algo: Option<String>,
    /// Graph sweep template; may repeat.
    #[arg(long)]
    graph: Vec<String>,
    /// Inclusive seed range `a..b`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fill runtime_ms (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Directory for one trace file per run.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    #[command(flatten)]
    flags: AlgoFlags,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "sleeping")]
    algo: Algorithm,
    #[arg(long)]
    graph: String,
    /// Inclusive seed range `a..b`.
    #[arg(long)]
    seeds: String,
    /// Any of mis, equiv, pruning, zdecay, exact.
    #[arg(long, default_value = "mis,equiv")]
    checks: String,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    flags: AlgoFlags,
}

#[derive(Args)]
struct RecheckArgs {
    trace: PathBuf,
}

/// Run output: the CSV columns, averages as numbers, plus the rest of the
/// configuration.
#[derive(Serialize)]
struct RunJson {
    algo: String,
    family: String,
    n: u64,
    m: u64,
    seed: u64,
    avg_awake: Option<f64>,
    max_awake: Option<u64>,
    total_rounds: Option<u64>,
    avg_finish: Option<f64>,
    mis_size: Option<u64>,
    verdict: String,
    rank_tie_flag: bool,
    runtime_ms: Option<u64>,
    graph: String,
    depth: Option<u32>,
    c: u32,
    messages_sent: Option<u64>,
}

fn params(algo: Algorithm, flags: &AlgoFlags) -> Result<AlgoParams, CliError> {
    let mut p = AlgoParams::new(algo);
    if let Some(c) = flags.c {
        p.c = c;
    }
    p.depth = flags.k;
    p.validate()?;
    Ok(p)
}

fn engine(flags: &AlgoFlags) -> EngineConfig {
    EngineConfig {
        round_cap: flags.cap.unwrap_or(DEFAULT_ROUND_CAP),
        ..EngineConfig::default()
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, CliError> {
    let params = params(args.algo, &args.flags)?;
    let instances = expand_template(&args.graph)?;
    let [instance] = instances.as_slice() else {
        return Err(CliError::usage("run takes a single graph, not a sweep"));
    };
    let cell = run_cell(&instance.family, &params, args.seed, engine(&args.flags))?;
    let row = ResultRow::new(&params, &instance.label, args.seed, &cell, args.timing);
    let (depth, sent) = match &cell.result {
        CellResult::Done { outcome, .. } => (Some(outcome.depth), Some(outcome.trace.messages_sent)),
        CellResult::Timeout => (None, None),
    };
    if let (Some(path), CellResult::Done { outcome, metrics }) = (&args.emit_trace, &cell.result) {
        TraceDump::new(&instance.spec, &params, outcome, metrics).write(path)?;
    }
    let decimal = |s: &Option<String>| s.as_deref().map(|x| x.parse::<f64>().expect("decimal"));
    print_json(&RunJson {
        avg_awake: decimal(&row.avg_awake),
        avg_finish: decimal(&row.avg_finish),
        algo: row.algo,
        family: row.family,
        n: row.n,
        m: row.m,
        seed: row.seed,
        max_awake: row.max_awake,
        total_rounds: row.total_rounds,
        mis_size: row.mis_size,
        verdict: row.verdict,
        rank_tie_flag: row.rank_tie_flag,
        runtime_ms: row.runtime_ms,
        graph: instance.spec.clone(),
        depth,
        c: params.c,
        messages_sent: sent,
    });
    Ok(match &cell.result {
        CellResult::Done { metrics, .. } if metrics.verdict.is_valid() => ExitCode::SUCCESS,
        CellResult::Done { .. } => ExitCode::from(2),
        CellResult::Timeout => {
            eprintln!("error: round cap reached");
            ExitCode::from(1)
        }
    })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode, CliError> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ExperimentOptions::parse_file(&text)?
        }
        None => ExperimentOptions::default(),
    };
    let flags = ExperimentOptions {
        algorithms: args.algo.as_deref().map(parse_algorithms).transpose()?,
        graphs: args.graph,
        seeds: args.seeds.as_deref().map(parse_seeds).transpose()?,
        c: args.flags.c,
        depth: args.flags.k,
        cap: args.flags.cap,
        out: args.out,
        timing: args.timing.then_some(true),
        trace_dir: args.trace_dir,
    };
    let config = base.overlay(flags).finish()?;
    let s = run_experiment(&config)?;
    eprintln!(
        "wrote {} rows to {} ({} invalid, {} timeouts); manifest {}",
        s.rows,
        config.out.display(),
        s.invalid,
        s.timeouts,
        s.manifest.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let config = VerifyConfig {
        params: params(args.algo, &args.flags)?,
        graph: args.graph,
        seeds: parse_seeds(&args.seeds).map_err(|e| CliError::usage(e.to_string()))?,
        checks: parse_checks(&args.checks)?,
        cap: args.flags.cap.unwrap_or(DEFAULT_ROUND_CAP),
    };
    let report = run_verify(&config)?;
    eprintln!("{}", summary(&report));
    print_json(&report);
    if let Some(path) = &args.report {
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
struct RecheckJson<'a> {
    trace: String,
    graph: &'a str,
    seed: u64,
    recorded_verdict: &'a str,
    verdict: &'static str,
    metrics: sleepmis_core::ComplexityMetrics,
}

fn cmd_recheck(args: RecheckArgs) -> Result<ExitCode, CliError> {
    let dump = TraceDump::read(&args.trace)?;
    let metrics = recheck(&dump)?;
    let verdict = metrics.verdict.label();
    let agrees = verdict == dump.verdict;
    let valid = metrics.verdict.is_valid();
    print_json(&RecheckJson {
        trace: args.trace.display().to_string(),
        graph: &dump.graph,
        seed: dump.seed,
        recorded_verdict: &dump.verdict,
        verdict,
        metrics,
    });
    if !agrees {
        eprintln!("recorded verdict {} but recheck gives {verdict}", dump.verdict);
    }
    Ok(if valid && agrees {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Recheck(a) => cmd_recheck(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
