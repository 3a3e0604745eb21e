//! Early-termination rules that resolve an interval without splitting it.
//!
//! Each rule replaces an active `(interval, coefficient)` pair by a
//! [`Commitment`] and moves its contribution into the residual target:
//!
//! * **unit**: at scale 1 the interval holds a single value `v`; select
//!   `c` copies of it.
//! * **singleton**: population 1, coefficient 1; the only element is taken.
//! * **filled**: coefficient equals population; every element is taken.
//! * **block**: the interval holds exactly the consecutive run spanning it;
//!   any `c` of those values reach every sum in a contiguous range, so the
//!   residual widens instead of branching.
//!
//! Unit resolution is always on. The other three can be disabled for
//! ablation runs.

use crate::candidate::{block_sum_range, Candidate, Commitment};
use crate::engine::target_bound_test;
use crate::metrics::{Rule, RuleFirings};
use crate::partition::{Interval, IntervalPartition};

/// Which optional rules are enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSet {
    pub filled: bool,
    pub block: bool,
    pub singleton: bool,
}

impl RuleSet {
    pub const ALL: RuleSet = RuleSet { filled: true, block: true, singleton: true };
    pub const NONE: RuleSet = RuleSet { filled: false, block: false, singleton: false };

    /// bit 0 = filled, bit 1 = block, bit 2 = singleton.
    pub fn bits(self) -> u8 {
        self.filled as u8 | (self.block as u8) << 1 | (self.singleton as u8) << 2
    }

    pub fn from_bits(bits: u8) -> Self {
        RuleSet { filled: bits & 1 != 0, block: bits & 2 != 0, singleton: bits & 4 != 0 }
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::ALL
    }
}

/// True iff the interval's elements are exactly `lower, lower+1, …, upper`,
/// each once.
pub fn detect_block(interval: &Interval, elements: &[u64]) -> bool {
    interval.population() as u64 == interval.diameter()
        && elements.iter().zip(interval.lower..=interval.upper).all(|(&e, v)| e == v)
}

fn active_interval<'p>(candidate: &Candidate, partition: &'p IntervalPartition, index: u64) -> (&'p Interval, u32) {
    let coefficient = candidate.coefficient(index).expect("interval is not active in this candidate");
    let interval = partition.interval(index).expect("active interval is unpopulated");
    (interval, coefficient)
}

/// Resolve a block interval: choose `c` of its consecutive values.
///
/// # Panics
///
/// If the interval is not a block or `c` exceeds its diameter.
pub fn apply_block(mut candidate: Candidate, partition: &IntervalPartition, index: u64) -> Candidate {
    let (interval, c) = active_interval(&candidate, partition, index);
    assert!(detect_block(interval, partition.elements_of(interval)), "interval {index} is not a block");
    assert!(c as u64 <= interval.diameter(), "coefficient {c} exceeds block width");
    debug_assert_eq!(
        block_sum_range(interval.lower, interval.upper, c),
        Commitment::BlockChoice { run_lo: interval.lower, run_hi: interval.upper, count: c }.sum_range()
    );
    candidate.commit(
        index,
        Commitment::BlockChoice { run_lo: interval.lower, run_hi: interval.upper, count: c },
    );
    candidate
}

/// Resolve an interval whose coefficient equals its population.
pub fn apply_filled(mut candidate: Candidate, partition: &IntervalPartition, index: u64) -> Candidate {
    let (interval, c) = active_interval(&candidate, partition, index);
    assert_eq!(c, interval.population(), "interval {index} is not filled");
    let elements = partition.elements_of(interval);
    let mut rest = elements;
    while let Some(&value) = rest.first() {
        let run = rest.iter().take_while(|&&e| e == value).count();
        candidate.commit(index, Commitment::Fixed { value, multiplicity: run as u32 });
        rest = &rest[run..];
    }
    candidate
}

/// Resolve a one-element interval carrying coefficient 1.
pub fn apply_singleton(candidate: Candidate, partition: &IntervalPartition, index: u64) -> Candidate {
    let (interval, c) = active_interval(&candidate, partition, index);
    assert!(interval.population() == 1 && c == 1, "interval {index} is not a singleton");
    apply_filled(candidate, partition, index)
}

/// Resolve a unit-width interval `[v, v]` by selecting `c` copies of `v`.
pub fn resolve_unit(mut candidate: Candidate, partition: &IntervalPartition, index: u64) -> Candidate {
    assert_eq!(partition.scale(), 1, "unit resolution needs scale 1");
    let (interval, c) = active_interval(&candidate, partition, index);
    assert!(c <= interval.population());
    candidate.commit(index, Commitment::Fixed { value: interval.lower, multiplicity: c });
    candidate
}

/// Apply every enabled rule to every active interval, without the final
/// envelope re-check.
pub(crate) fn reduce_unchecked(
    mut candidate: Candidate,
    partition: &IntervalPartition,
    rules: &RuleSet,
    firings: &mut RuleFirings,
) -> Candidate {
    debug_assert_eq!(candidate.scale, partition.scale());
    let unit = partition.scale() == 1;
    let snapshot = candidate.active.clone();
    for (index, c) in snapshot {
        let interval = partition.interval(index).expect("active interval is unpopulated");
        let pop = interval.population();
        let rule = if unit {
            Rule::Unit
        } else if rules.singleton && pop == 1 && c == 1 {
            Rule::Singleton
        } else if rules.filled && c == pop {
            Rule::Filled
        } else if rules.block && detect_block(interval, partition.elements_of(interval)) {
            Rule::Block
        } else {
            continue;
        };
        candidate = match rule {
            Rule::Unit => resolve_unit(candidate, partition, index),
            Rule::Singleton => apply_singleton(candidate, partition, index),
            Rule::Filled => apply_filled(candidate, partition, index),
            Rule::Block => apply_block(candidate, partition, index),
        };
        firings.record(rule);
    }
    candidate
}

/// Apply the rules, then re-run the target envelope test on the result.
/// Returns `None` when the reduced candidate cannot reach the target.
pub fn reduce(
    candidate: Candidate,
    partition: &IntervalPartition,
    rules: &RuleSet,
    firings: &mut RuleFirings,
) -> Option<Candidate> {
    let reduced = reduce_unchecked(candidate, partition, rules, firings);
    target_bound_test(&reduced, partition).then_some(reduced)
}
