//! Reference solvers: exhaustive search and Horowitz–Sahni
//! meet-in-the-middle. Both report value multisets in the same canonical
//! form as the readout so results compare with `==`.

use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::readout::{Solution, SolutionSet};

pub const BRUTE_FORCE_MAX_N: usize = 30;
pub const MITM_MAX_N: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineError {
    TooLarge { n: usize, limit: usize },
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::TooLarge { n, limit } if *limit == BRUTE_FORCE_MAX_N => write!(
                f,
                "brute force refuses n = {n} (limit {limit}); use the meet-in-the-middle baseline"
            ),
            BaselineError::TooLarge { n, limit } => write!(f, "n = {n} exceeds the limit of {limit}"),
        }
    }
}

impl core::error::Error for BaselineError {}

fn guard(instance: &Instance, limit: usize) -> Result<(), BaselineError> {
    if instance.len() > limit {
        return Err(BaselineError::TooLarge { n: instance.len(), limit });
    }
    Ok(())
}

fn pick(elements: &[u64], mask: u64) -> Solution {
    Solution::from_values((0..elements.len()).filter(|&i| mask >> i & 1 == 1).map(|i| elements[i]))
}

/// Visit every nonempty index subset once, in Gray-code order, with its sum.
fn for_each_subset(elements: &[u64], mut visit: impl FnMut(u64, u64)) {
    let n = elements.len();
    let (mut mask, mut sum) = (0u64, 0u64);
    for step in 1u64..1 << n {
        let bit = step.trailing_zeros();
        mask ^= 1 << bit;
        if mask >> bit & 1 == 1 {
            sum += elements[bit as usize];
        } else {
            sum -= elements[bit as usize];
        }
        visit(mask, sum);
    }
}

/// Every nonempty subset summing to the target, by exhaustion.
pub fn brute_force_enumerate(instance: &Instance) -> Result<SolutionSet, BaselineError> {
    guard(instance, BRUTE_FORCE_MAX_N)?;
    let elements = instance.elements();
    let target = instance.target();
    let mut hits = Vec::new();
    for_each_subset(elements, |mask, sum| {
        if sum == target {
            hits.push(mask);
        }
    });
    Ok(SolutionSet::from_unsorted(hits.into_iter().map(|m| pick(elements, m))))
}

/// The nonempty subset minimising `|sum − target|`; ties go to the lower
/// sum, then to the canonically smallest solution.
pub fn brute_force_closest(instance: &Instance) -> Result<(Solution, u64), BaselineError> {
    guard(instance, BRUTE_FORCE_MAX_N)?;
    let elements = instance.elements();
    let target = instance.target();
    // (deviation, above target) orders candidates; masks collected per tie
    let mut best_key = (u64::MAX, true);
    let mut best_masks: Vec<u64> = Vec::new();
    for_each_subset(elements, |mask, sum| {
        let key = (sum.abs_diff(target), sum > target);
        if key < best_key {
            best_key = key;
            best_masks.clear();
        }
        if key == best_key {
            best_masks.push(mask);
        }
    });
    let best = best_masks.into_iter().map(|m| pick(elements, m)).min().expect("n ≥ 1");
    Ok((best, best_key.0))
}

/// Table sizes of one meet-in-the-middle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MitmStats {
    pub left_entries: u64,
    pub right_entries: u64,
}

/// `(sum, mask)` for every subset of `half`, including the empty one.
fn half_sums(half: &[u64]) -> Vec<(u64, u64)> {
    let mut table = Vec::with_capacity(1 << half.len());
    table.push((0, 0));
    for (i, &e) in half.iter().enumerate() {
        for j in 0..table.len() {
            let (s, m) = table[j];
            table.push((s + e, m | 1 << i));
        }
    }
    table
}

/// Horowitz–Sahni: split the input order at `⌈n/2⌉`, list both halves'
/// subset sums, sort the right half, and match each left sum against it.
pub fn mitm_enumerate(instance: &Instance) -> Result<SolutionSet, BaselineError> {
    mitm_enumerate_with_stats(instance).map(|(set, _)| set)
}

pub fn mitm_enumerate_with_stats(instance: &Instance) -> Result<(SolutionSet, MitmStats), BaselineError> {
    guard(instance, MITM_MAX_N)?;
    let elements = instance.elements();
    let target = instance.target();
    let split = elements.len().div_ceil(2);
    let (left, right) = elements.split_at(split);
    let left_table = half_sums(left);
    let mut right_table = half_sums(right);
    right_table.sort_unstable();
    let stats = MitmStats { left_entries: left_table.len() as u64, right_entries: right_table.len() as u64 };

    let mut hits = Vec::new();
    for &(ls, lm) in &left_table {
        let Some(need) = target.checked_sub(ls) else { continue };
        let start = right_table.partition_point(|&(s, _)| s < need);
        for &(rs, rm) in right_table[start..].iter().take_while(|&&(s, _)| s == need) {
            debug_assert_eq!(ls + rs, target);
            if lm | rm != 0 {
                hits.push(lm | rm << split);
            }
        }
    }
    let set = SolutionSet::from_unsorted(hits.into_iter().map(|m| pick(elements, m)));
    Ok((set, stats))
}
