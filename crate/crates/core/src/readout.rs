//! Turning resolved candidates into concrete subsets.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::candidate::{block_sum_range, Candidate, Commitment};
use crate::engine::{run_stages, EngineError, EngineOptions, Mode};
use crate::instance::Instance;
use crate::metrics::Metrics;

/// A selected sub-multiset, as `(value, multiplicity)` pairs ascending by
/// value.
///
/// Solutions order by size first, then lexicographically on the expanded
/// value list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    picks: Vec<(u64, u32)>,
    sum: u64,
}

impl Solution {
    /// Build from any list of values (repeats allowed).
    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Self {
        let mut values: Vec<u64> = values.into_iter().collect();
        values.sort_unstable();
        let mut picks: Vec<(u64, u32)> = Vec::new();
        for v in values {
            match picks.last_mut() {
                Some((last, m)) if *last == v => *m += 1,
                _ => picks.push((v, 1)),
            }
        }
        Self::from_picks(picks)
    }

    fn from_picks(picks: Vec<(u64, u32)>) -> Self {
        let sum = picks.iter().map(|&(v, m)| v * m as u64).sum();
        Solution { picks, sum }
    }

    pub fn picks(&self) -> &[(u64, u32)] {
        &self.picks
    }

    pub fn sum(&self) -> u64 {
        self.sum
    }

    /// Number of selected elements.
    pub fn size(&self) -> u32 {
        self.picks.iter().map(|&(_, m)| m).sum()
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.picks.iter().flat_map(|&(v, m)| core::iter::repeat_n(v, m as usize))
    }

    /// True iff every pick is available in `instance` with enough copies.
    pub fn fits(&self, instance: &Instance) -> bool {
        self.picks.iter().all(|&(v, m)| instance.multiplicity(v) >= m)
    }

    /// Number of distinct index subsets of `instance` realising this
    /// value multiset (product of binomials over repeated values).
    pub fn realizations(&self, instance: &Instance) -> u128 {
        self.picks
            .iter()
            .map(|&(v, m)| binomial(instance.multiplicity(v) as u128, m as u128))
            .product()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl Ord for Solution {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.values().cmp(other.values()))
    }
}

impl PartialOrd for Solution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Solution {
    /// Space-separated ascending values, repeats written out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Deduplicated solutions in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    /// The solution cap was reached.
    pub truncated: bool,
}

impl SolutionSet {
    pub fn from_unsorted(solutions: impl IntoIterator<Item = Solution>) -> Self {
        let set: BTreeSet<Solution> = solutions.into_iter().collect();
        SolutionSet { solutions: set.into_iter().collect(), truncated: false }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Solution> {
        self.solutions.iter()
    }
}

/// Resolved and the residual admits an exact hit.
pub fn is_exact(candidate: &Candidate) -> bool {
    candidate.is_resolved() && candidate.residual.contains(0)
}

/// Concrete solutions of `candidate` summing to the instance target, at
/// most `cap` of them. The flag reports truncation.
///
/// # Panics
///
/// If the candidate is not exact.
pub fn reconstruct(candidate: &Candidate, instance: &Instance, cap: u64) -> (Vec<Solution>, bool) {
    assert!(is_exact(candidate), "candidate is not an exact solution lineage");
    reconstruct_at(candidate, instance.target(), cap)
}

/// Concrete solutions of a resolved candidate that sum to `sum`.
pub(crate) fn reconstruct_at(candidate: &Candidate, sum: u64, cap: u64) -> (Vec<Solution>, bool) {
    let mut fixed: Vec<u64> = Vec::new();
    let mut blocks: Vec<(u64, u64, u32)> = Vec::new();
    let mut fixed_sum = 0i64;
    for commitment in candidate.commitments.to_vec() {
        match commitment {
            Commitment::Fixed { value, multiplicity } => {
                fixed.extend(core::iter::repeat_n(value, multiplicity as usize));
                fixed_sum += value as i64 * multiplicity as i64;
            }
            Commitment::BlockChoice { run_lo, run_hi, count } => blocks.push((run_lo, run_hi, count)),
        }
    }
    let mut emit = Emitter { fixed: &fixed, blocks: &blocks, sum, cap, out: Vec::new(), truncated: false };
    let mut shares = Vec::with_capacity(blocks.len());
    emit.distribute(0, sum as i64 - fixed_sum, &mut shares);
    (emit.out, emit.truncated)
}

struct Emitter<'a> {
    fixed: &'a [u64],
    blocks: &'a [(u64, u64, u32)],
    sum: u64,
    cap: u64,
    out: Vec<Solution>,
    truncated: bool,
}

impl Emitter<'_> {
    fn full(&self) -> bool {
        self.truncated
    }

    /// Assign block `i` a share of `remaining`, in ascending order.
    fn distribute(&mut self, i: usize, remaining: i64, shares: &mut Vec<i64>) {
        if self.full() {
            return;
        }
        if i == self.blocks.len() {
            if remaining == 0 {
                self.expand(shares);
            }
            return;
        }
        let (rest_min, rest_max) = self.blocks[i + 1..]
            .iter()
            .map(|&(a, b, c)| block_sum_range(a, b, c))
            .fold((0, 0), |(lo, hi), (a, b)| (lo + a, hi + b));
        let (a, b, c) = self.blocks[i];
        let (min, max) = block_sum_range(a, b, c);
        let lo = min.max(remaining - rest_max);
        let hi = max.min(remaining - rest_min);
        for share in lo..=hi {
            shares.push(share);
            self.distribute(i + 1, remaining - share, shares);
            shares.pop();
            if self.truncated {
                return;
            }
        }
    }

    fn expand(&mut self, shares: &[i64]) {
        let choices: Vec<Vec<Vec<u64>>> = self
            .blocks
            .iter()
            .zip(shares)
            .map(|(&(a, b, c), &s)| subsets_with_sum(a, b, c, s))
            .collect();
        let mut picked = Vec::new();
        self.product(&choices, 0, &mut picked);
    }

    fn product(&mut self, choices: &[Vec<Vec<u64>>], i: usize, picked: &mut Vec<u64>) {
        if self.full() {
            return;
        }
        if i == choices.len() {
            if self.out.len() as u64 >= self.cap {
                self.truncated = true;
                return;
            }
            let solution = Solution::from_values(self.fixed.iter().chain(picked.iter()).copied());
            assert_eq!(solution.sum(), self.sum, "reconstructed solution misses its sum");
            self.out.push(solution);
            return;
        }
        for subset in &choices[i] {
            let mark = picked.len();
            picked.extend_from_slice(subset);
            self.product(choices, i + 1, picked);
            picked.truncate(mark);
        }
    }
}

/// All `count`-subsets of `[lo, hi]` summing to `sum`, lexicographic.
pub fn subsets_with_sum(lo: u64, hi: u64, count: u32, sum: i64) -> Vec<Vec<u64>> {
    fn go(next: u64, hi: u64, left: u32, sum: i64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            if sum == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let r = left as i64;
        let tri = r * (r - 1) / 2;
        let mut v = next;
        while v + left as u64 - 1 <= hi {
            // smallest sum from v upward, largest sum within [v, hi]
            if r * v as i64 + tri > sum {
                break;
            }
            if r * hi as i64 - tri >= sum {
                cur.push(v);
                go(v + 1, hi, left - 1, sum - v as i64, cur, out);
                cur.pop();
            }
            v += 1;
        }
    }
    let mut out = Vec::new();
    go(lo, hi, count, sum, &mut Vec::new(), &mut out);
    out
}

/// Result of a decision or enumeration run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: SolutionSet,
    pub metrics: Metrics,
}

/// A run stopped by a resource cap, with what it had so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Capped<T> {
    pub error: EngineError,
    pub partial: T,
}

impl<T> fmt::Display for Capped<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.error.fmt(f)
    }
}

fn collect(instance: &Instance, exact: &[Candidate], cap: u64) -> SolutionSet {
    let mut set = BTreeSet::new();
    let mut truncated = false;
    for candidate in exact {
        let room = cap.saturating_sub(set.len() as u64);
        if room == 0 {
            truncated = true;
            break;
        }
        let (solutions, cut) = reconstruct(candidate, instance, room);
        truncated |= cut;
        set.extend(solutions);
    }
    SolutionSet { solutions: set.into_iter().collect(), truncated }
}

fn solve_exact(instance: &Instance, mode: Mode, options: &EngineOptions) -> Result<Enumeration, Capped<Enumeration>> {
    let cap = if mode == Mode::Decision { 1 } else { options.max_solutions };
    match run_stages(instance, mode, options) {
        Ok(outcome) => {
            let solutions = collect(instance, &outcome.exact, cap);
            let mut metrics = outcome.metrics;
            metrics.solutions_found = solutions.len() as u64;
            Ok(Enumeration { solutions, metrics })
        }
        Err(error) => {
            let partial = error.partial();
            let mut solutions = collect(instance, &partial.exact, cap);
            solutions.truncated = true;
            let mut metrics = partial.metrics.clone();
            metrics.solutions_found = solutions.len() as u64;
            Err(Capped { partial: Enumeration { solutions, metrics }, error })
        }
    }
}

/// Every distinct solution (as value multisets), up to
/// `options.max_solutions`.
pub fn enumerate_all(instance: &Instance, options: &EngineOptions) -> Result<Enumeration, Capped<Enumeration>> {
    solve_exact(instance, Mode::Enumerate, options)
}

/// At most one solution; stops the engine at the first exact lineage.
pub fn decide(instance: &Instance, options: &EngineOptions) -> Result<Enumeration, Capped<Enumeration>> {
    solve_exact(instance, Mode::Decision, options)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimum {
    pub solution: Solution,
    /// `|solution.sum() − target|`
    pub deviation: u64,
    pub metrics: Metrics,
}

/// The subset whose sum is closest to the target.
///
/// Branch-and-bound over the engine finds the smallest deviation `d`; the
/// reported solution is then the canonical first one summing to `t − d`
/// (preferred) or `t + d`.
pub fn optimize(instance: &Instance, options: &EngineOptions) -> Result<Optimum, Capped<Option<Optimum>>> {
    let target = instance.target();
    let outcome = match run_stages(instance, Mode::Optimize, options) {
        Ok(outcome) => outcome,
        Err(error) => {
            let partial = error.partial().best.as_ref().map(|(cand, d)| {
                let sum = nearest_sum(cand, target);
                let (solutions, _) = reconstruct_at(cand, sum, 1);
                Optimum { solution: solutions[0].clone(), deviation: *d, metrics: error.partial().metrics.clone() }
            });
            return Err(Capped { error, partial });
        }
    };
    let (_, deviation) = outcome.best.expect("every seed resolves to some subset");
    let mut metrics = outcome.metrics;

    let below = target.checked_sub(deviation).filter(|&s| s >= 1);
    for sum in below.into_iter().chain((deviation > 0).then_some(target + deviation)) {
        let shifted = instance.with_target(sum).expect("shifted target within limits");
        let found = enumerate_all(&shifted, options).map_err(|capped| Capped {
            error: capped.error,
            partial: None,
        })?;
        metrics.absorb(&found.metrics);
        if let Some(solution) = found.solutions.solutions.into_iter().next() {
            metrics.solutions_found = 1;
            return Ok(Optimum { solution, deviation, metrics });
        }
    }
    unreachable!("branch and bound reported deviation {deviation} but no subset attains it")
}

/// Achievable sum of a resolved candidate closest to `target`, preferring
/// the lower side.
fn nearest_sum(candidate: &Candidate, target: u64) -> u64 {
    // achievable sums are [t − hi, t − lo]
    let t = target as i64;
    let (lo, hi) = (t - candidate.residual.hi, t - candidate.residual.lo);
    t.clamp(lo, hi) as u64
}
