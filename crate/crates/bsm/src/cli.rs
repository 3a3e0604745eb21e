//! `bsm gen | solve | bench`.
//!
//! Exit status: 0 success, 1 no solution (decision mode), 2 usage or input
//! error, 3 a resource cap stopped the run.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bsm_core::baselines::{brute_force_closest, brute_force_enumerate, mitm_enumerate};
use bsm_core::engine::DEFAULT_CAP;
use bsm_core::{decide, enumerate_all, optimize, EngineOptions, Instance, Metrics, Mode, RuleSet, SolutionSet};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bench::{self, BenchConfig, BitsMode, Solver};
use crate::format::{parse_instance, write_instance, write_optimum, write_solutions};
use crate::generate::{generate_instance, GeneratorConfig, TargetMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_SOLUTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPPED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bsm", version, about = "Subset Sum by multi-scale interval refinement")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random instance.
    Gen(GenArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Run generated instances through the solvers and write CSV rows.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target is the sum of a random subset (default).
    #[arg(long, conflicts_with = "random_target")]
    planted: bool,
    /// Size of the planted subset instead of a uniformly random subset.
    #[arg(long, conflicts_with = "random_target")]
    planted_size: Option<usize>,
    /// Target uniform in [1, sum of elements].
    #[arg(long)]
    random_target: bool,
    #[arg(long)]
    distinct: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "enumerate")]
    mode: Mode,
    #[arg(long)]
    no_block: bool,
    #[arg(long)]
    no_filled: bool,
    #[arg(long)]
    no_singleton: bool,
    /// Run one subset size at a time.
    #[arg(long)]
    per_size: bool,
    /// Use the smallest power of two strictly above the largest element.
    #[arg(long)]
    strict_range: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_solutions: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_evals: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_live: u64,
    /// Write the run's counters as a one-row bench CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, value_parser = parse_baseline)]
    baseline: Option<Solver>,
    /// Annotate each solution with its number of index-level realizations.
    #[arg(long)]
    realizations: bool,
    /// Record wall time in the stats file.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `A:B` or `A:B:step`.
    #[arg(long, value_parser = parse_n_range)]
    n: (usize, usize, usize),
    /// `match-n`, or a fixed bit length (`12` or `fixed:12`).
    #[arg(long, value_parser = parse_bits, default_value = "match-n")]
    bits: BitsMode,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "bsm")]
    solvers: Vec<Solver>,
    /// Run the engine with all rules on and again with all rules off.
    #[arg(long)]
    ablate: bool,
    #[arg(long, value_parser = parse_mode, default_value = "enumerate")]
    mode: Mode,
    #[arg(long)]
    distinct: bool,
    #[arg(long)]
    random_target: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_evals: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    max_live: u64,
    /// Record wall time (makes output machine-dependent).
    #[arg(long)]
    timing: bool,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|_| format!("unknown mode `{s}` (expected decision, enumerate or optimize)"))
}

fn parse_baseline(s: &str) -> Result<Solver, String> {
    match s.parse()? {
        Solver::Bsm => Err("baseline must be brute or mitm".into()),
        solver => Ok(solver),
    }
}

fn parse_n_range(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.parse::<usize>().map_err(|_| format!("bad n range `{s}`"));
    match parts.as_slice() {
        [a, b] => Ok((num(a)?, num(b)?, 1)),
        [a, b, step] => Ok((num(a)?, num(b)?, num(step)?)),
        _ => Err(format!("n range must be A:B or A:B:step, got `{s}`")),
    }
}

fn parse_bits(s: &str) -> Result<BitsMode, String> {
    if s == "match-n" {
        return Ok(BitsMode::MatchN);
    }
    let value = s.strip_prefix("fixed:").unwrap_or(s);
    value.parse().map(BitsMode::Fixed).map_err(|_| format!("bits must be match-n or an integer, got `{s}`"))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: String, source: crate::format::FormatError },
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(io_error(path)),
        None => stdout.write_all(bytes).map_err(io_error(Path::new("<stdout>"))),
    }
}

/// Parse `args` (including the program name) and run. Returns the exit
/// status; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return status;
        }
    };
    let result = match cli.command {
        Command::Gen(args) => gen(args, stdout),
        Command::Solve(args) => solve(args, stdout, stderr),
        Command::Bench(args) => run_bench(args, stdout),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "bsm: {e}");
            EXIT_USAGE
        }
    }
}

fn gen(args: GenArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let target_mode = if args.random_target { TargetMode::UniformRandom } else { TargetMode::Planted(args.planted_size) };
    let config = GeneratorConfig {
        n: args.n,
        bits: args.bits,
        seed: args.seed,
        target_mode,
        require_distinct: args.distinct,
    };
    let instance = generate_instance(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(args.out.as_deref(), stdout, write_instance(&instance).as_bytes())?;
    Ok(EXIT_OK)
}

fn solve(args: SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.input).map_err(io_error(&args.input))?;
    let instance = parse_instance(&text)
        .map_err(|source| CliError::Input { path: args.input.display().to_string(), source })?;
    let options = EngineOptions {
        rules: RuleSet { filled: !args.no_filled, block: !args.no_block, singleton: !args.no_singleton },
        per_size: args.per_size,
        strict_range: args.strict_range,
        max_live_candidates: args.max_live,
        max_evaluations: args.max_evals,
        max_solutions: args.max_solutions,
    };
    let realizations = args.realizations.then_some(&instance);
    let id = args.input.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
    let bits = bench::bit_length(&instance);

    if let Some(solver) = args.baseline {
        let report = solve_baseline(&instance, solver, args.mode, realizations)?;
        stdout.write_all(report.0.as_bytes()).map_err(io_error(Path::new("<stdout>")))?;
        if let Some(path) = &args.stats {
            let row = bench::run_cell(&id, &instance, bits, solver, args.mode, &options, args.timing);
            write_stats(path, row)?;
        }
        return Ok(report.1);
    }

    let start = Instant::now();
    let (text, status, metrics, capped) = match args.mode {
        Mode::Decision | Mode::Enumerate => {
            let run = if args.mode == Mode::Decision { decide(&instance, &options) } else { enumerate_all(&instance, &options) };
            let (found, capped) = match run {
                Ok(found) => (found, None),
                Err(c) => (c.partial.clone(), Some(c.to_string())),
            };
            if found.solutions.truncated && args.mode == Mode::Enumerate {
                let _ = writeln!(stderr, "bsm: output truncated at {} solutions", args.max_solutions);
            }
            let status = if args.mode == Mode::Decision && found.solutions.is_empty() {
                EXIT_NO_SOLUTION
            } else {
                EXIT_OK
            };
            (write_solutions(&found.solutions, realizations), status, found.metrics, capped)
        }
        Mode::Optimize => match optimize(&instance, &options) {
            Ok(best) => (write_optimum(&best.solution, best.deviation, realizations), EXIT_OK, best.metrics, None),
            Err(c) => {
                let text = c
                    .partial
                    .as_ref()
                    .map(|p| write_optimum(&p.solution, p.deviation, realizations))
                    .unwrap_or_default();
                let metrics = c.error.partial().metrics.clone();
                (text, EXIT_OK, metrics, Some(format!("{} (best so far is not proven optimal)", c.error)))
            }
        },
    };
    stdout.write_all(text.as_bytes()).map_err(io_error(Path::new("<stdout>")))?;
    if let Some(path) = &args.stats {
        let mut metrics: Metrics = metrics;
        if args.timing {
            metrics.wall_time = start.elapsed();
        }
        write_stats(path, stats_row(&id, &instance, bits, args.mode, &options, &metrics, capped.is_some(), args.timing))?;
    }
    if let Some(message) = capped {
        let _ = writeln!(stderr, "bsm: {message}");
        return Ok(EXIT_CAPPED);
    }
    Ok(status)
}

#[allow(clippy::too_many_arguments)]
fn stats_row(
    id: &str,
    instance: &Instance,
    bits: u32,
    mode: Mode,
    options: &EngineOptions,
    metrics: &Metrics,
    capped: bool,
    timing: bool,
) -> bench::BenchRow {
    bench::BenchRow {
        instance_id: id.to_string(),
        n: instance.len(),
        bits,
        density: instance.len() as f64 / bits as f64,
        mode: mode.name().to_string(),
        rules_enabled: options.rules.bits(),
        evaluations: metrics.evaluations,
        peak_live_candidates: metrics.peak_live_candidates,
        stages_executed: metrics.stages_executed,
        deepest_scale: metrics.deepest_scale_reached,
        solutions_found: metrics.solutions_found,
        wall_ms: if timing { metrics.wall_time.as_secs_f64() * 1e3 } else { 0.0 },
        solver: Solver::Bsm,
        capped,
    }
}

fn write_stats(path: &Path, row: bench::BenchRow) -> Result<(), CliError> {
    let mut buf = Vec::new();
    bench::write_rows(&mut buf, &[row]).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::write(path, buf).map_err(io_error(path))
}

fn solve_baseline(
    instance: &Instance,
    solver: Solver,
    mode: Mode,
    realizations: Option<&Instance>,
) -> Result<(String, i32), CliError> {
    let refused = |e: bsm_core::baselines::BaselineError| CliError::Usage(e.to_string());
    if mode == Mode::Optimize {
        if solver == Solver::Mitm {
            return Err(CliError::Usage("the mitm baseline has no optimize mode".into()));
        }
        let (solution, deviation) = brute_force_closest(instance).map_err(refused)?;
        return Ok((write_optimum(&solution, deviation, realizations), EXIT_OK));
    }
    let mut set = match solver {
        Solver::Mitm => mitm_enumerate(instance).map_err(refused)?,
        _ => brute_force_enumerate(instance).map_err(refused)?,
    };
    if mode == Mode::Decision {
        set = SolutionSet { solutions: set.solutions.into_iter().take(1).collect(), truncated: false };
        if set.is_empty() {
            return Ok((String::new(), EXIT_NO_SOLUTION));
        }
    }
    Ok((write_solutions(&set, realizations), EXIT_OK))
}

fn run_bench(args: BenchArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (n_from, n_to, n_step) = args.n;
    let config = BenchConfig {
        n_from,
        n_to,
        n_step,
        bits: args.bits,
        trials: args.trials,
        seed: args.seed,
        solvers: args.solvers,
        ablate: args.ablate,
        mode: args.mode,
        distinct: args.distinct,
        target_mode: if args.random_target { TargetMode::UniformRandom } else { TargetMode::Planted(None) },
        options: EngineOptions { max_evaluations: args.max_evals, max_live_candidates: args.max_live, ..Default::default() },
        timing: args.timing,
    };
    let rows = match args.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| bench::run_bench(&config)),
        None => bench::run_bench(&config),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    bench::write_rows(&mut buf, &rows).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(args.out.as_deref(), stdout, &buf)?;
    Ok(EXIT_OK)
}
