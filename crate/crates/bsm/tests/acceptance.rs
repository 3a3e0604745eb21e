//! One test per acceptance criterion. Each prints a single
//! `criterion N ...: PASS|FAIL` line; run with `--nocapture` to see them.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::fs;
use std::process::{Command, Output};

use bsm::bench::{read_rows, run_bench, slope, BenchConfig, BenchRow, BitsMode, Solver};
use bsm::generate::TargetMode;
use bsm_core::baselines::{brute_force_closest, brute_force_enumerate, mitm_enumerate};
use bsm_core::candidate::block_sum_range;
use bsm_core::{compute_range, decide, enumerate_all, optimize, EngineOptions, Instance, Mode, RuleSet};

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number} ({name}): {verdict} {detail}");
    assert!(pass, "criterion {number} ({name}) failed: {detail}");
}

/// Exhaustive and sampled small instances: n ≤ 14, elements ≤ 16,
/// targets up to one past the total.
fn small_suite() -> Vec<Instance> {
    let mut suite = common::exhaustive_distinct(6);
    suite.extend(common::random_small(0xacce55, 2000, 14, 16));
    suite
}

/// 500 instances with n ≤ 16 and up to 12-bit elements, many with repeats.
fn wide_suite() -> Vec<Instance> {
    common::random_wide(0x5eed, 500, 16, 12)
}

fn bsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsm")).args(args).output().expect("spawn bsm")
}

#[test]
fn criterion_1_intro_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("intro.txt");
    fs::write(&input, "9\n2 5 6 7 8\n").unwrap();
    let out = bsm(&["solve", "--mode", "enumerate", "--input", input.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    let pass = out.status.success() && text == "2 7\n";
    report(1, "intro example", pass, &format!("output {:?}", text.trim_end()));
}

#[test]
fn criterion_2_oracle_equivalence() {
    let small = small_suite();
    let wide = wide_suite();
    let options = EngineOptions::default();
    let mut mismatches = Vec::new();
    let mut nonempty = 0;
    let mut duplicates = 0;
    for inst in small.iter().chain(&wide) {
        let expected = brute_force_enumerate(inst).unwrap();
        let got = enumerate_all(inst, &options).expect("within caps").solutions;
        let found = decide(inst, &options).expect("within caps").solutions;
        let decision_ok = match found.solutions.first() {
            Some(s) => found.len() == 1 && expected.solutions.contains(s),
            None => expected.is_empty(),
        };
        if got != expected || !decision_ok {
            mismatches.push(format!("{:?} t={}", inst.elements(), inst.target()));
        }
        nonempty += usize::from(!expected.is_empty());
        duplicates += usize::from(!inst.is_distinct());
    }
    let detail = format!(
        "{} small + {} wide cases, {} with solutions, {} with repeated elements, {} mismatches {:?}",
        small.len(),
        wide.len(),
        nonempty,
        duplicates,
        mismatches.len(),
        mismatches.iter().take(3).collect::<Vec<_>>()
    );
    report(2, "oracle equivalence", mismatches.is_empty() && small.len() >= 2000 && wide.len() >= 500, &detail);
}

#[test]
fn criterion_3_optimize_equivalence() {
    let suite = small_suite();
    let options = EngineOptions::default();
    let mut mismatches = Vec::new();
    for inst in &suite {
        let (_, expected) = brute_force_closest(inst).unwrap();
        let best = optimize(inst, &options).expect("within caps");
        let actual = best.solution.sum().abs_diff(inst.target());
        if best.deviation != expected || actual != best.deviation || !best.solution.fits(inst) {
            mismatches.push(format!("{:?} t={} got {} want {}", inst.elements(), inst.target(), best.deviation, expected));
        }
    }
    let detail = format!("{} cases, {} mismatches {:?}", suite.len(), mismatches.len(), mismatches.iter().take(3).collect::<Vec<_>>());
    report(3, "optimize equivalence", mismatches.is_empty(), &detail);
}

#[test]
fn criterion_4_baseline_cross_check() {
    let suite: Vec<Instance> = small_suite().into_iter().chain(wide_suite()).collect();
    let mismatches = suite.iter().filter(|inst| mitm_enumerate(inst).unwrap() != brute_force_enumerate(inst).unwrap()).count();
    report(4, "mitm vs brute force", mismatches == 0, &format!("{} cases, {mismatches} mismatches", suite.len()));
}

fn ablation_rows(bits: BitsMode, distinct: bool, n_to: usize) -> Vec<BenchRow> {
    let config = BenchConfig {
        n_from: 4,
        n_to,
        n_step: 2,
        bits,
        trials: 5,
        seed: 2024,
        solvers: vec![Solver::Bsm],
        ablate: true,
        mode: Mode::Enumerate,
        distinct,
        target_mode: TargetMode::Planted(None),
        options: EngineOptions { max_evaluations: 1 << 36, max_live_candidates: 1 << 28, ..Default::default() },
        timing: false,
    };
    run_bench(&config).unwrap()
}

#[test]
fn criterion_5_pruning_monotonicity() {
    let mut rows = ablation_rows(BitsMode::MatchN, true, 20);
    rows.extend(ablation_rows(BitsMode::Fixed(5), false, 20));
    let mut violations = Vec::new();
    let (mut dense, mut strict, mut capped) = (0, 0, 0);
    for pair in rows.chunks(2) {
        let (on, off) = (&pair[0], &pair[1]);
        assert_eq!((on.rules_enabled, off.rules_enabled), (RuleSet::ALL.bits(), RuleSet::NONE.bits()));
        capped += usize::from(on.capped || off.capped);
        if on.evaluations > off.evaluations {
            violations.push(format!("{} bits={}: {} > {}", on.instance_id, on.bits, on.evaluations, off.evaluations));
        }
        if on.bits == on.n as u32 && on.n >= 12 {
            dense += 1;
            strict += usize::from(on.evaluations < off.evaluations);
        }
    }
    let share = strict as f64 / dense as f64;
    let detail = format!(
        "{} instances, {} violations {:?}, strict on {strict}/{dense} dense distinct n >= 12 ({:.0}%), {capped} capped",
        rows.len() / 2,
        violations.len(),
        violations.iter().take(3).collect::<Vec<_>>(),
        share * 100.0
    );
    report(5, "pruning monotonicity", violations.is_empty() && capped == 0 && dense > 0 && share >= 0.9, &detail);
}

#[test]
fn criterion_6_early_halt() {
    let mut suite: Vec<Instance> = small_suite().into_iter().chain(wide_suite()).filter(Instance::is_distinct).collect();
    for n in (4..=20).step_by(2) {
        for seed in 0..5 {
            suite.push(common::dense_distinct(seed, n, n as u32));
        }
    }
    let options = EngineOptions::default();
    let mut failures = Vec::new();
    let mut single_scale = 0;
    for inst in &suite {
        let range = compute_range(inst);
        // R = 1 has no scale 2: the seed stage already sits at scale 1
        let floor = range.min(2);
        single_scale += usize::from(range == 1);
        let deepest = enumerate_all(inst, &options).expect("within caps").metrics.deepest_scale_reached;
        if deepest < floor {
            failures.push(format!("{:?} t={} deepest {deepest}", inst.elements(), inst.target()));
        }
    }
    let detail = format!(
        "{} distinct instances ({single_scale} with R = 1), {} reached scale 1 {:?}",
        suite.len(),
        failures.len(),
        failures.iter().take(3).collect::<Vec<_>>()
    );
    report(6, "early halt", failures.is_empty(), &detail);
}

#[test]
fn criterion_7_growth_rate() {
    let config = BenchConfig {
        n_from: 12,
        n_to: 30,
        n_step: 2,
        bits: BitsMode::MatchN,
        trials: 5,
        seed: 7,
        solvers: vec![Solver::Bsm],
        ablate: false,
        mode: Mode::Enumerate,
        distinct: true,
        target_mode: TargetMode::Planted(None),
        options: EngineOptions { max_evaluations: 1 << 40, max_live_candidates: 1 << 30, ..Default::default() },
        timing: false,
    };
    let rows = run_bench(&config).unwrap();
    let mut points = Vec::new();
    let mut per_n = Vec::new();
    for n in config.sizes() {
        let max = rows.iter().filter(|r| r.n == n).map(|r| r.evaluations).max().unwrap();
        let log = (max as f64).log2();
        points.push((n as f64, log));
        per_n.push(format!("{n}:{log:.2}"));
    }
    let capped = rows.iter().filter(|r| r.capped).count();
    let fitted = slope(&points);
    let detail = format!("slope {fitted:.3} (limit 0.6), {capped} capped, log2 max evaluations [{}]", per_n.join(" "));
    report(7, "growth rate", capped == 0 && fitted <= 0.6, &detail);
}

#[test]
fn criterion_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut differing = Vec::new();
    let mut pairs = 0;
    let mut check = |label: &str, run: &dyn Fn(&str) -> Vec<u8>| {
        pairs += 1;
        let (a, b) = (run("a"), run("b"));
        if a != b || a.is_empty() {
            differing.push(label.to_string());
        }
    };

    check("gen", &|tag| {
        let out = path(&format!("gen-{tag}.txt"));
        bsm(&["gen", "--n", "18", "--bits", "18", "--seed", "11", "--distinct", "--out", &out]);
        fs::read(out).unwrap()
    });
    let input = path("gen-a.txt");
    for mode in ["decision", "enumerate", "optimize"] {
        check(&format!("solve --mode {mode} --stats"), &|tag| {
            let stats = path(&format!("stats-{mode}-{tag}.csv"));
            let out = bsm(&["solve", "--input", &input, "--mode", mode, "--stats", &stats]);
            let mut bytes = out.stdout;
            bytes.extend(fs::read(stats).unwrap());
            bytes
        });
    }
    check("solve --baseline mitm --stats", &|tag| {
        let stats = path(&format!("stats-mitm-{tag}.csv"));
        let mut bytes = bsm(&["solve", "--input", &input, "--baseline", "mitm", "--stats", &stats]).stdout;
        bytes.extend(fs::read(stats).unwrap());
        bytes
    });
    check("bench", &|_| {
        bsm(&["bench", "--n", "6:16:2", "--trials", "3", "--seed", "5", "--solvers", "bsm,mitm,brute", "--ablate"]).stdout
    });
    check("bench --jobs", &|tag| {
        let jobs = if tag == "a" { "1" } else { "4" };
        bsm(&["bench", "--n", "6:12:2", "--trials", "3", "--distinct", "--jobs", jobs]).stdout
    });

    let bench = bsm(&["bench", "--n", "6:16:2", "--trials", "3", "--seed", "5", "--solvers", "bsm,mitm,brute", "--ablate"]);
    let rows = read_rows(bench.stdout.as_slice()).unwrap();
    let detail = format!("{pairs} invocation pairs, {} rows per bench, differing {:?}", rows.len(), differing);
    report(8, "determinism", differing.is_empty() && !rows.is_empty(), &detail);
}

#[test]
fn criterion_9_block_contiguity() {
    let mut runs = 0;
    let mut mismatches = Vec::new();
    for lo in 1u64..=64 {
        for width in 1u64..=8 {
            let hi = lo + width - 1;
            runs += 1;
            let mut sums: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); width as usize + 1];
            for mask in 0u32..1 << width {
                let sum: u64 = (0..width).filter(|i| mask >> i & 1 == 1).map(|i| lo + i).sum();
                sums[mask.count_ones() as usize].insert(sum as i64);
            }
            for (count, got) in sums.iter().enumerate() {
                let (min, max) = block_sum_range(lo, hi, count as u32);
                let want: BTreeSet<i64> = (min..=max).collect();
                if *got != want {
                    mismatches.push(format!("[{lo},{hi}] c={count}"));
                }
            }
        }
    }

    // whole-engine check: runs and runs with a stray element, every target
    let options = EngineOptions::default();
    let mut engine_cases = 0;
    for lo in 1u64..=24 {
        for width in 1u64..=8 {
            let run: Vec<u64> = (lo..lo + width).collect();
            for elems in [run.clone(), [run, vec![lo + width + 3]].concat()] {
                let total: u64 = elems.iter().sum();
                for t in 1..=total + 1 {
                    let inst = Instance::new(elems.clone(), t).unwrap();
                    engine_cases += 1;
                    if enumerate_all(&inst, &options).unwrap().solutions != brute_force_enumerate(&inst).unwrap() {
                        mismatches.push(format!("engine {elems:?} t={t}"));
                    }
                }
            }
        }
    }
    let detail = format!(
        "{runs} runs x all counts, {engine_cases} engine cases, {} mismatches {:?}",
        mismatches.len(),
        mismatches.iter().take(3).collect::<Vec<_>>()
    );
    report(9, "block sum contiguity", mismatches.is_empty(), &detail);
}
