//! The stage loop: seed one candidate per subset size on `[1, R]`, then
//! halve the interval width, splitting every surviving coefficient between
//! the two children of its interval, until all candidates are resolved or
//! none remain.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::candidate::Candidate;
use crate::instance::{compute_range, compute_range_strict, Instance};
use crate::metrics::Metrics;
use crate::partition::IntervalPartition;
use crate::rules::{reduce_unchecked, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Stop at the first exact solution.
    Decision,
    /// Collect every exact solution.
    Enumerate,
    /// Find the subset sum closest to the target.
    Optimize,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Decision => "decision",
            Mode::Enumerate => "enumerate",
            Mode::Optimize => "optimize",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Mode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "decision" => Ok(Mode::Decision),
            "enumerate" => Ok(Mode::Enumerate),
            "optimize" => Ok(Mode::Optimize),
            _ => Err(()),
        }
    }
}

pub const DEFAULT_CAP: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EngineOptions {
    pub rules: RuleSet,
    /// Run each subset size through its own stage loop instead of seeding
    /// all sizes together.
    pub per_size: bool,
    /// Use the smallest power of two strictly above the largest element.
    pub strict_range: bool,
    pub max_live_candidates: u64,
    pub max_evaluations: u64,
    /// Most solutions the readout reconstructs.
    pub max_solutions: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            rules: RuleSet::ALL,
            per_size: false,
            strict_range: false,
            max_live_candidates: DEFAULT_CAP,
            max_evaluations: DEFAULT_CAP,
            max_solutions: DEFAULT_CAP,
        }
    }
}

impl EngineOptions {
    pub fn with_rules(rules: RuleSet) -> Self {
        EngineOptions { rules, ..Default::default() }
    }

    pub fn range(&self, instance: &Instance) -> u64 {
        if self.strict_range {
            compute_range_strict(instance)
        } else {
            compute_range(instance)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EngineOutcome {
    pub range: u64,
    /// Resolved candidates whose residual contains zero, in discovery order.
    pub exact: Vec<Candidate>,
    /// Optimize mode: the resolved candidate closest to the target and its
    /// deviation.
    pub best: Option<(Candidate, u64)>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapKind {
    LiveCandidates,
    Evaluations,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// A resource cap was exceeded; `partial` holds what was found so far.
    Capped { cap: CapKind, limit: u64, partial: Box<EngineOutcome> },
}

impl EngineError {
    pub fn partial(&self) -> &EngineOutcome {
        match self {
            EngineError::Capped { partial, .. } => partial,
        }
    }
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Capped { cap: CapKind::LiveCandidates, limit, .. } => {
                write!(f, "live candidate cap of {limit} exceeded")
            }
            EngineError::Capped { cap: CapKind::Evaluations, limit, .. } => {
                write!(f, "evaluation cap of {limit} exceeded")
            }
        }
    }
}

impl core::error::Error for EngineError {}

/// Lower and upper envelope `Σ c·lower`, `Σ c·upper` over active intervals.
fn envelope(candidate: &Candidate, partition: &IntervalPartition) -> (i64, i64) {
    candidate.active.iter().fold((0, 0), |(lo, hi), &(k, c)| {
        let (l, u) = partition.bounds(k);
        (lo + c as i64 * l as i64, hi + c as i64 * u as i64)
    })
}

/// Distance from zero to `[lo, hi]`.
fn distance_to_zero(lo: i64, hi: i64) -> u64 {
    if lo > 0 {
        lo as u64
    } else if hi < 0 {
        hi.unsigned_abs()
    } else {
        0
    }
}

/// Smallest possible `|achieved − residual|` given active contributions in
/// `[low, high]`.
fn gap(low: i64, high: i64, candidate: &Candidate) -> u64 {
    distance_to_zero(low - candidate.residual.hi, high - candidate.residual.lo)
}

/// Every active interval holds at least as many elements as its coefficient.
pub fn population_test(candidate: &Candidate, partition: &IntervalPartition) -> bool {
    debug_assert_eq!(candidate.scale, partition.scale());
    candidate.active.iter().all(|&(k, c)| partition.population(k) >= c)
}

/// `Σ c·lower ≤ residual.hi` and `Σ c·upper ≥ residual.lo`.
pub fn target_bound_test(candidate: &Candidate, partition: &IntervalPartition) -> bool {
    debug_assert_eq!(candidate.scale, partition.scale());
    let (low, high) = envelope(candidate, partition);
    low <= candidate.residual.hi && high >= candidate.residual.lo
}

/// Lower bound on `|sum − target|` over every subset consistent with the
/// candidate: the distance from zero to `[L − residual.hi, U − residual.lo]`.
pub fn deviation_bound(candidate: &Candidate, partition: &IntervalPartition) -> u64 {
    let (low, high) = envelope(candidate, partition);
    gap(low, high, candidate)
}

/// Envelope test generalised for branch-and-bound: passes iff
/// [`deviation_bound`] is below `slack`. A slack of 1 is exactly
/// [`target_bound_test`].
fn within(candidate: &Candidate, partition: &IntervalPartition, slack: u64) -> bool {
    deviation_bound(candidate, partition) < slack
}

/// Seeds for subset sizes `1..=n` at scale `R`, kept if they pass both
/// tests and survive reduction with every rule enabled.
pub fn seed_candidates(instance: &Instance, range: u64) -> Vec<Candidate> {
    let partition = IntervalPartition::build(range, range, instance.elements());
    let mut firings = Default::default();
    (1..=instance.len() as u32)
        .map(|size| Candidate::seed(range, size, instance.target()))
        .filter(|c| population_test(c, &partition) && target_bound_test(c, &partition))
        .filter_map(|c| crate::rules::reduce(c, &partition, &RuleSet::ALL, &mut firings))
        .collect()
}

struct SplitChoice {
    entries: [(u64, u32); 2],
    len: usize,
    low: i64,
    high: i64,
}

/// Enumerate the children of `candidate` at `child.scale()` that pass both
/// tests under `slack`, appending them to `out`. Returns the number of
/// coefficient combinations evaluated: every `(c1, c2)` with
/// `c1 + c2 = C` for every active interval, `Π (C + 1)` in total.
///
/// Combinations failing the population test are skipped without being
/// materialised, and partial envelopes prune whole sub-products; the
/// surviving set is the same as testing every combination one by one.
fn split_into(candidate: &Candidate, child: &IntervalPartition, slack: u64, out: &mut Vec<Candidate>) -> u64 {
    let mut evaluations: u64 = 1;
    let mut choices: Vec<Vec<SplitChoice>> = Vec::with_capacity(candidate.active.len());
    for &(k, c) in &candidate.active {
        evaluations = evaluations.saturating_mul(c as u64 + 1);
        let (left, right) = (2 * k, 2 * k + 1);
        let (pl, pr) = (child.population(left), child.population(right));
        let (ll, ul) = child.bounds(left);
        let (lr, ur) = child.bounds(right);
        let mut options = Vec::new();
        for c1 in c.saturating_sub(pr)..=c.min(pl) {
            let c2 = c - c1;
            let mut entries = [(0, 0); 2];
            let mut len = 0;
            if c1 > 0 {
                entries[len] = (left, c1);
                len += 1;
            }
            if c2 > 0 {
                entries[len] = (right, c2);
                len += 1;
            }
            options.push(SplitChoice {
                entries,
                len,
                low: c1 as i64 * ll as i64 + c2 as i64 * lr as i64,
                high: c1 as i64 * ul as i64 + c2 as i64 * ur as i64,
            });
        }
        if options.is_empty() {
            return evaluations_for_rest(evaluations, &candidate.active[choices.len() + 1..]);
        }
        choices.push(options);
    }

    // suffix bounds over intervals i.. for pruning partial assignments
    let m = choices.len();
    let mut min_low = alloc::vec![0i64; m + 1];
    let mut max_high = alloc::vec![0i64; m + 1];
    for i in (0..m).rev() {
        min_low[i] = min_low[i + 1] + choices[i].iter().map(|o| o.low).min().unwrap_or(0);
        max_high[i] = max_high[i + 1] + choices[i].iter().map(|o| o.high).max().unwrap_or(0);
    }

    let mut active = Vec::with_capacity(2 * m);
    descend(candidate, child, slack, &choices, &min_low, &max_high, 0, 0, 0, &mut active, out);
    evaluations
}

fn evaluations_for_rest(acc: u64, rest: &[(u64, u32)]) -> u64 {
    rest.iter().fold(acc, |acc, &(_, c)| acc.saturating_mul(c as u64 + 1))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    parent: &Candidate,
    child: &IntervalPartition,
    slack: u64,
    choices: &[Vec<SplitChoice>],
    min_low: &[i64],
    max_high: &[i64],
    depth: usize,
    low: i64,
    high: i64,
    active: &mut Vec<(u64, u32)>,
    out: &mut Vec<Candidate>,
) {
    if gap(low + min_low[depth], high + max_high[depth], parent) >= slack {
        return;
    }
    if depth == choices.len() {
        out.push(Candidate {
            scale: child.scale(),
            active: active.clone(),
            residual: parent.residual,
            commitments: parent.commitments.clone(),
        });
        return;
    }
    for option in &choices[depth] {
        let mark = active.len();
        active.extend_from_slice(&option.entries[..option.len]);
        descend(
            parent,
            child,
            slack,
            choices,
            min_low,
            max_high,
            depth + 1,
            low + option.low,
            high + option.high,
            active,
            out,
        );
        active.truncate(mark);
    }
}

/// Children of `candidate` one scale down that pass the population and
/// target envelope tests. Reduction rules are not applied.
///
/// # Panics
///
/// If `child` is not exactly one scale below `parent`.
pub fn split_candidate(
    candidate: &Candidate,
    parent: &IntervalPartition,
    child: &IntervalPartition,
) -> Vec<Candidate> {
    assert_eq!(candidate.scale, parent.scale());
    assert_eq!(child.scale() * 2, parent.scale(), "child partition must be one scale finer");
    let mut out = Vec::new();
    split_into(candidate, child, 1, &mut out);
    out
}

struct Run<'a> {
    instance: &'a Instance,
    mode: Mode,
    options: &'a EngineOptions,
    outcome: EngineOutcome,
    halted: bool,
}

impl<'a> Run<'a> {
    fn slack(&self) -> u64 {
        match self.mode {
            Mode::Optimize => self.outcome.best.as_ref().map_or(u64::MAX, |(_, d)| *d),
            _ => 1,
        }
    }

    fn capped(&self, cap: CapKind, limit: u64) -> EngineError {
        EngineError::Capped { cap, limit, partial: Box::new(self.outcome.clone()) }
    }

    /// Reduce a freshly tested candidate, route it to the readout if it is
    /// resolved, otherwise keep it for the next stage if it still passes.
    fn accept(&mut self, candidate: Candidate, partition: &IntervalPartition, next: &mut Vec<Candidate>) {
        let reduced = reduce_unchecked(candidate, partition, &self.options.rules, &mut self.outcome.metrics.rule_firings);
        if reduced.is_resolved() {
            self.finish(reduced);
        } else if within(&reduced, partition, self.slack()) {
            next.push(reduced);
        }
    }

    fn finish(&mut self, resolved: Candidate) {
        let deviation = distance_to_zero(resolved.residual.lo, resolved.residual.hi);
        match self.mode {
            Mode::Decision | Mode::Enumerate => {
                if deviation == 0 {
                    self.outcome.exact.push(resolved);
                    self.outcome.metrics.solutions_found += 1;
                    self.halted = self.mode == Mode::Decision;
                }
            }
            Mode::Optimize => {
                if deviation < self.slack() {
                    if deviation == 0 {
                        self.outcome.exact.push(resolved.clone());
                        self.outcome.metrics.solutions_found += 1;
                        self.halted = true;
                    }
                    self.outcome.best = Some((resolved, deviation));
                }
            }
        }
    }

    fn admit(&mut self, next: &mut [Candidate]) -> Result<(), EngineError> {
        if next.len() as u64 > self.options.max_live_candidates {
            return Err(self.capped(CapKind::LiveCandidates, self.options.max_live_candidates));
        }
        Ok(())
    }

    fn schedule(&mut self, sizes: core::ops::RangeInclusive<u32>) -> Result<(), EngineError> {
        let range = self.outcome.range;
        let mut partition = IntervalPartition::build(range, range, self.instance.elements());
        let metrics = &mut self.outcome.metrics;
        metrics.stages_executed += 1;
        metrics.reach_scale(range);

        let mut live = Vec::new();
        for size in sizes {
            if self.halted {
                break;
            }
            self.outcome.metrics.evaluations += 1;
            let seed = Candidate::seed(range, size, self.instance.target());
            if population_test(&seed, &partition) && within(&seed, &partition, self.slack()) {
                self.accept(seed, &partition, &mut live);
            }
        }
        self.settle(&mut live, &partition)?;

        let mut children = Vec::new();
        while !live.is_empty() && !self.halted {
            // unit scale resolves every interval, so anything live is above it
            debug_assert!(partition.scale() > 1);
            let child = partition.refine();
            self.outcome.metrics.stages_executed += 1;
            self.outcome.metrics.reach_scale(child.scale());
            let mut next = Vec::new();
            for parent in &live {
                children.clear();
                let slack = self.slack();
                let evaluations = split_into(parent, &child, slack, &mut children);
                let metrics = &mut self.outcome.metrics;
                metrics.evaluations = metrics.evaluations.saturating_add(evaluations);
                if metrics.evaluations > self.options.max_evaluations {
                    return Err(self.capped(CapKind::Evaluations, self.options.max_evaluations));
                }
                for c in children.drain(..) {
                    if self.halted {
                        break;
                    }
                    self.accept(c, &child, &mut next);
                }
                self.admit(&mut next)?;
                if self.halted {
                    break;
                }
            }
            live = next;
            self.settle(&mut live, &child)?;
            partition = child;
        }
        Ok(())
    }

    fn settle(&mut self, live: &mut Vec<Candidate>, partition: &IntervalPartition) -> Result<(), EngineError> {
        self.admit(live)?;
        if self.mode == Mode::Optimize {
            // the incumbent may have tightened since these were admitted
            let slack = self.slack();
            live.retain(|c| within(c, partition, slack));
        }
        live.sort_by(|a, b| a.active.cmp(&b.active));
        let metrics = &mut self.outcome.metrics;
        metrics.peak_live_candidates = metrics.peak_live_candidates.max(live.len() as u64);
        Ok(())
    }
}

/// Drive the stage loop over `instance`.
pub fn run_stages(instance: &Instance, mode: Mode, options: &EngineOptions) -> Result<EngineOutcome, EngineError> {
    let range = options.range(instance);
    let mut run = Run {
        instance,
        mode,
        options,
        outcome: EngineOutcome { range, ..Default::default() },
        halted: false,
    };
    let n = instance.len() as u32;
    if options.per_size {
        for size in 1..=n {
            run.schedule(size..=size)?;
            if run.halted {
                break;
            }
        }
    } else {
        run.schedule(1..=n)?;
    }
    Ok(run.outcome)
}
