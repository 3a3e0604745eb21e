//! Benchmark harness: generated instances, solver/rule-set runs, CSV rows.

use std::io::{Read, Write};
use std::time::Instant;

use bsm_core::baselines::{brute_force_closest, brute_force_enumerate, mitm_enumerate_with_stats};
use bsm_core::{decide, enumerate_all, optimize, EngineOptions, Instance, Metrics, Mode, RuleSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{generate_instance, ConfigError, GeneratorConfig, TargetMode};

pub const CSV_VERSION_LINE: &str = "# bsm-bench v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Bsm,
    Mitm,
    Brute,
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bsm" => Ok(Solver::Bsm),
            "mitm" => Ok(Solver::Mitm),
            "brute" => Ok(Solver::Brute),
            other => Err(format!("unknown solver `{other}` (expected bsm, mitm or brute)")),
        }
    }
}

/// One run of one solver on one instance.
///
/// For the baselines, `evaluations` counts subset sums formed (`2^n − 1`
/// for brute force, both half-tables for meet-in-the-middle) and
/// `peak_live_candidates` the table entries held; the scale columns are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub n: usize,
    pub bits: u32,
    pub density: f64,
    pub mode: String,
    pub rules_enabled: u8,
    pub evaluations: u64,
    pub peak_live_candidates: u64,
    pub stages_executed: u64,
    pub deepest_scale: u64,
    pub solutions_found: u64,
    pub wall_ms: f64,
    pub solver: Solver,
    pub capped: bool,
}

/// Bit length of the largest element.
pub fn bit_length(instance: &Instance) -> u32 {
    64 - instance.max_element().leading_zeros()
}

fn base_row(id: &str, instance: &Instance, bits: u32, solver: Solver, mode: Mode) -> BenchRow {
    BenchRow {
        instance_id: id.to_string(),
        n: instance.len(),
        bits,
        density: instance.len() as f64 / bits as f64,
        mode: mode.name().to_string(),
        rules_enabled: 0,
        evaluations: 0,
        peak_live_candidates: 0,
        stages_executed: 0,
        deepest_scale: 0,
        solutions_found: 0,
        wall_ms: 0.0,
        solver,
        capped: false,
    }
}

fn fill_metrics(row: &mut BenchRow, metrics: &Metrics) {
    row.evaluations = metrics.evaluations;
    row.peak_live_candidates = metrics.peak_live_candidates;
    row.stages_executed = metrics.stages_executed;
    row.deepest_scale = metrics.deepest_scale_reached;
    row.solutions_found = metrics.solutions_found;
}

/// Run the engine in `mode` and report its counters.
pub fn bsm_metrics(instance: &Instance, mode: Mode, options: &EngineOptions) -> (Metrics, bool) {
    match mode {
        Mode::Decision | Mode::Enumerate => {
            let run = if mode == Mode::Decision { decide(instance, options) } else { enumerate_all(instance, options) };
            match run {
                Ok(e) => (e.metrics, false),
                Err(capped) => (capped.partial.metrics, true),
            }
        }
        Mode::Optimize => match optimize(instance, options) {
            Ok(o) => (o.metrics, false),
            Err(capped) => (capped.error.partial().metrics.clone(), true),
        },
    }
}

/// One bench cell. `timing` records wall time; without it `wall_ms` is 0
/// so the output is byte-reproducible.
pub fn run_cell(
    id: &str,
    instance: &Instance,
    bits: u32,
    solver: Solver,
    mode: Mode,
    options: &EngineOptions,
    timing: bool,
) -> BenchRow {
    let mut row = base_row(id, instance, bits, solver, mode);
    let start = Instant::now();
    match solver {
        Solver::Bsm => {
            row.rules_enabled = options.rules.bits();
            let (metrics, capped) = bsm_metrics(instance, mode, options);
            fill_metrics(&mut row, &metrics);
            row.capped = capped;
        }
        Solver::Brute => {
            row.evaluations = (1u64 << instance.len().min(63)) - 1;
            let found = match mode {
                Mode::Optimize => brute_force_closest(instance).map(|_| 1),
                _ => brute_force_enumerate(instance).map(|s| s.len() as u64),
            };
            match found {
                Ok(count) => row.solutions_found = if mode == Mode::Decision { count.min(1) } else { count },
                Err(_) => row.capped = true,
            }
        }
        Solver::Mitm => match mitm_enumerate_with_stats(instance) {
            Ok((set, stats)) => {
                row.evaluations = stats.left_entries + stats.right_entries;
                row.peak_live_candidates = stats.left_entries + stats.right_entries;
                let count = set.len() as u64;
                row.solutions_found = if mode == Mode::Decision { count.min(1) } else { count };
            }
            Err(_) => row.capped = true,
        },
    }
    if timing {
        row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    row
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitsMode {
    MatchN,
    Fixed(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_from: usize,
    pub n_to: usize,
    pub n_step: usize,
    pub bits: BitsMode,
    pub trials: usize,
    pub seed: u64,
    pub solvers: Vec<Solver>,
    /// Run the engine with all rules on and again with all off.
    pub ablate: bool,
    pub mode: Mode,
    pub distinct: bool,
    pub target_mode: TargetMode,
    pub options: EngineOptions,
    pub timing: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("empty n range {from}:{to}:{step}")]
    Range { from: usize, to: usize, step: usize },
    #[error("the mitm baseline has no optimize mode")]
    MitmOptimize,
    #[error("n = {n}: {source}")]
    Generator { n: usize, source: ConfigError },
}

impl BenchConfig {
    pub fn sizes(&self) -> impl Iterator<Item = usize> {
        (self.n_from..=self.n_to).step_by(self.n_step.max(1))
    }

    pub fn bits_for(&self, n: usize) -> u32 {
        match self.bits {
            BitsMode::MatchN => n as u32,
            BitsMode::Fixed(b) => b,
        }
    }

    /// Instance seed for `(n, trial)`, a pure function of the master seed.
    pub fn instance_seed(&self, n: usize, trial: usize) -> u64 {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(self.seed);
        rng.set_stream(((n as u64) << 32) | trial as u64);
        rand::RngCore::next_u64(&mut rng)
    }

    pub fn generator(&self, n: usize, trial: usize) -> GeneratorConfig {
        GeneratorConfig {
            n,
            bits: self.bits_for(n),
            seed: self.instance_seed(n, trial),
            target_mode: self.target_mode,
            require_distinct: self.distinct,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.n_from == 0 || self.n_from > self.n_to || self.n_step == 0 {
            return Err(BenchError::Range { from: self.n_from, to: self.n_to, step: self.n_step });
        }
        if self.mode == Mode::Optimize && self.solvers.contains(&Solver::Mitm) {
            return Err(BenchError::MitmOptimize);
        }
        for n in self.sizes() {
            self.generator(n, 0).validate().map_err(|source| BenchError::Generator { n, source })?;
        }
        Ok(())
    }
}

/// Generate every `(n, trial)` instance and run the configured cells.
/// Cells run in parallel; rows come back in `(n, trial, solver, rules)`
/// order regardless of scheduling.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> =
        config.sizes().flat_map(|n| (0..config.trials).map(move |t| (n, t))).collect();
    let rows: Vec<Vec<BenchRow>> = tasks
        .par_iter()
        .map(|&(n, trial)| {
            let gen = config.generator(n, trial);
            let instance = generate_instance(&gen).expect("validated generator config");
            let id = format!("n{n}-t{trial}");
            let mut rows = Vec::new();
            for &solver in &config.solvers {
                if solver == Solver::Bsm {
                    let mut rule_sets = vec![config.options.rules];
                    if config.ablate {
                        rule_sets = vec![RuleSet::ALL, RuleSet::NONE];
                    }
                    for rules in rule_sets {
                        let options = EngineOptions { rules, ..config.options.clone() };
                        rows.push(run_cell(&id, &instance, gen.bits, solver, config.mode, &options, config.timing));
                    }
                } else {
                    rows.push(run_cell(&id, &instance, gen.bits, solver, config.mode, &config.options, config.timing));
                }
            }
            rows
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_rows<W: Write>(mut out: W, rows: &[BenchRow]) -> csv::Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut writer = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if rows.is_empty() {
        writer.write_record(COLUMNS)?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

const COLUMNS: [&str; 14] = [
    "instance_id",
    "n",
    "bits",
    "density",
    "mode",
    "rules_enabled",
    "evaluations",
    "peak_live_candidates",
    "stages_executed",
    "deepest_scale",
    "solutions_found",
    "wall_ms",
    "solver",
    "capped",
];

pub fn read_rows<R: Read>(input: R) -> csv::Result<Vec<BenchRow>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input)
        .deserialize()
        .collect()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|&(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let var: f64 = points.iter().map(|&(x, _)| (x - mean_x).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config() -> BenchConfig {
        BenchConfig {
            n_from: 12,
            n_to: 20,
            n_step: 2,
            bits: BitsMode::MatchN,
            trials: 5,
            seed: 1,
            solvers: vec![Solver::Bsm, Solver::Mitm],
            ablate: false,
            mode: Mode::Enumerate,
            distinct: true,
            target_mode: TargetMode::Planted(None),
            options: EngineOptions::default(),
            timing: false,
        }
    }

    #[test]
    fn row_count() {
        let rows = run_bench(&config()).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| !r.capped && r.solutions_found >= 1));
    }

    #[test]
    fn ablation_never_adds_work() {
        let rows = run_bench(&BenchConfig { solvers: vec![Solver::Bsm], ablate: true, ..config() }).unwrap();
        assert_eq!(rows.len(), 50);
        for pair in rows.chunks(2) {
            assert_eq!((pair[0].rules_enabled, pair[1].rules_enabled), (7, 0));
            assert!(pair[0].evaluations <= pair[1].evaluations, "{pair:?}");
        }
    }

    #[test]
    fn instance_seeds_are_distinct_and_stable() {
        let c = config();
        assert_eq!(c.instance_seed(12, 0), c.instance_seed(12, 0));
        assert_ne!(c.instance_seed(12, 0), c.instance_seed(12, 1));
        assert_ne!(c.instance_seed(12, 0), c.instance_seed(14, 0));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(run_bench(&BenchConfig { n_from: 5, n_to: 4, ..config() }), Err(BenchError::Range { .. })));
        assert_eq!(run_bench(&BenchConfig { mode: Mode::Optimize, ..config() }), Err(BenchError::MitmOptimize));
        let crowded = BenchConfig { bits: BitsMode::Fixed(3), n_from: 8, n_to: 8, ..config() };
        assert!(matches!(run_bench(&crowded), Err(BenchError::Generator { n: 8, .. })));
    }

    #[test]
    fn empty_csv_has_header() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# bsm-bench v1\ninstance_id,n,bits"));
        assert!(read_rows(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|x| (x as f64, 0.5 * x as f64 + 3.0)).collect();
        assert!((slope(&pts) - 0.5).abs() < 1e-12);
    }

    fn row_strategy() -> impl Strategy<Value = BenchRow> {
        (
            "[a-z0-9-]{1,12}",
            1usize..64,
            1u32..48,
            0.0f64..10.0,
            prop::sample::select(vec!["decision", "enumerate", "optimize"]),
            0u8..8,
            any::<u64>(),
            any::<u64>(),
            (any::<u64>(), any::<u64>(), any::<u64>()),
            0.0f64..1e6,
            prop::sample::select(vec![Solver::Bsm, Solver::Mitm, Solver::Brute]),
            any::<bool>(),
        )
            .prop_map(|(id, n, bits, density, mode, rules, evals, peak, (stages, deepest, sols), wall, solver, capped)| {
                BenchRow {
                    instance_id: id,
                    n,
                    bits,
                    density,
                    mode: mode.to_string(),
                    rules_enabled: rules,
                    evaluations: evals,
                    peak_live_candidates: peak,
                    stages_executed: stages,
                    deepest_scale: deepest,
                    solutions_found: sols,
                    wall_ms: wall,
                    solver,
                    capped,
                }
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec(row_strategy(), 0..6)) {
            let mut buf = Vec::new();
            write_rows(&mut buf, &rows).unwrap();
            prop_assert_eq!(read_rows(buf.as_slice()).unwrap(), rows);
        }
    }
}
