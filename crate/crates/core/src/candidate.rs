//! Coefficient combinations and the residual target they carry.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// Closed integer interval of sums the still-active intervals must produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidualTarget {
    pub lo: i64,
    pub hi: i64,
}

impl ResidualTarget {
    pub fn exact(value: i64) -> Self {
        ResidualTarget { lo: value, hi: value }
    }

    pub fn contains(&self, value: i64) -> bool {
        self.lo <= value && value <= self.hi
    }

    pub fn width(&self) -> i64 {
        self.hi - self.lo
    }

    /// Subtract a contribution known to lie in `[min, max]`.
    pub fn subtract(self, min: i64, max: i64) -> Self {
        debug_assert!(min <= max);
        ResidualTarget { lo: self.lo - max, hi: self.hi - min }
    }
}

impl fmt::Display for ResidualTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A resolved part of a candidate's selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Commitment {
    /// `multiplicity` copies of `value`.
    Fixed { value: u64, multiplicity: u32 },
    /// `count` distinct values out of the consecutive run `[run_lo, run_hi]`,
    /// every member of which occurs exactly once in the instance.
    BlockChoice { run_lo: u64, run_hi: u64, count: u32 },
}

impl Commitment {
    /// Number of elements this commitment selects.
    pub fn size(&self) -> u32 {
        match *self {
            Commitment::Fixed { multiplicity, .. } => multiplicity,
            Commitment::BlockChoice { count, .. } => count,
        }
    }

    /// Smallest and largest sum the commitment can contribute.
    pub fn sum_range(&self) -> (i64, i64) {
        match *self {
            Commitment::Fixed { value, multiplicity } => {
                let s = value as i64 * multiplicity as i64;
                (s, s)
            }
            Commitment::BlockChoice { run_lo, run_hi, count } => block_sum_range(run_lo, run_hi, count),
        }
    }
}

/// Sums reachable by choosing `count` distinct integers from `[lo, hi]`:
/// every integer in `[c*lo + c(c-1)/2, c*hi - c(c-1)/2]`.
pub fn block_sum_range(lo: u64, hi: u64, count: u32) -> (i64, i64) {
    let c = count as i64;
    let tri = c * (c - 1) / 2;
    (c * lo as i64 + tri, c * hi as i64 - tri)
}

struct Link {
    commitment: Commitment,
    prev: Option<Arc<Link>>,
}

/// Append-only commitment list shared structurally between a parent and
/// its children.
#[derive(Clone, Default)]
pub struct Commitments {
    head: Option<Arc<Link>>,
    len: usize,
}

impl Commitments {
    pub fn push(&mut self, commitment: Commitment) {
        let prev = self.head.take();
        self.head = Some(Arc::new(Link { commitment, prev }));
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Commitments in the order they were made.
    pub fn to_vec(&self) -> Vec<Commitment> {
        let mut out = Vec::with_capacity(self.len);
        let mut cur = self.head.as_deref();
        while let Some(link) = cur {
            out.push(link.commitment);
            cur = link.prev.as_deref();
        }
        out.reverse();
        out
    }
}

impl PartialEq for Commitments {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.to_vec() == other.to_vec()
    }
}

impl Eq for Commitments {}

impl fmt::Debug for Commitments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_vec()).finish()
    }
}

/// One surviving coefficient combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub scale: u64,
    /// `(interval index, coefficient)`, ascending by index, coefficients ≥ 1.
    pub active: Vec<(u64, u32)>,
    pub residual: ResidualTarget,
    pub commitments: Commitments,
}

impl Candidate {
    /// A seed selecting `size` elements from the single interval `[1, R]`.
    pub fn seed(range: u64, size: u32, target: u64) -> Self {
        Candidate {
            scale: range,
            active: alloc::vec![(0, size)],
            residual: ResidualTarget::exact(target as i64),
            commitments: Commitments::default(),
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.active.is_empty()
    }

    pub fn coefficient(&self, index: u64) -> Option<u32> {
        self.active
            .binary_search_by_key(&index, |&(k, _)| k)
            .ok()
            .map(|pos| self.active[pos].1)
    }

    /// Active coefficients plus committed multiplicities.
    pub fn subset_size(&self) -> u32 {
        self.active_size() + self.commitments.to_vec().iter().map(Commitment::size).sum::<u32>()
    }

    pub fn active_size(&self) -> u32 {
        self.active.iter().map(|&(_, c)| c).sum()
    }

    /// Drop interval `index` from the active map, recording `commitment`
    /// and subtracting its sum range from the residual.
    pub(crate) fn commit(&mut self, index: u64, commitment: Commitment) {
        if let Ok(pos) = self.active.binary_search_by_key(&index, |&(k, _)| k) {
            self.active.remove(pos);
        }
        let (min, max) = commitment.sum_range();
        self.residual = self.residual.subtract(min, max);
        self.commitments.push(commitment);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn commitments_preserve_order_and_share_prefix() {
        let mut a = Commitments::default();
        a.push(Commitment::Fixed { value: 2, multiplicity: 1 });
        let mut b = a.clone();
        b.push(Commitment::BlockChoice { run_lo: 5, run_hi: 8, count: 1 });
        a.push(Commitment::Fixed { value: 3, multiplicity: 2 });
        assert_eq!(a.to_vec()[1], Commitment::Fixed { value: 3, multiplicity: 2 });
        assert_eq!(b.to_vec()[1], Commitment::BlockChoice { run_lo: 5, run_hi: 8, count: 1 });
        assert_eq!(a.to_vec()[0], b.to_vec()[0]);
    }

    #[test]
    fn fixed_shift_preserves_width_and_block_widens() {
        let r = ResidualTarget { lo: 3, hi: 10 };
        let fixed = Commitment::Fixed { value: 4, multiplicity: 3 }.sum_range();
        let shifted = r.subtract(fixed.0, fixed.1);
        assert_eq!(shifted, ResidualTarget { lo: -9, hi: -2 });
        assert_eq!(shifted.width(), r.width());
        // c * (b - a - c + 1) extra width
        let (a, b, c) = (5u64, 12u64, 3u32);
        let block = block_sum_range(a, b, c);
        let widened = r.subtract(block.0, block.1);
        assert_eq!(widened.width() - r.width(), c as i64 * (b - a + 1 - c as u64) as i64);
    }

    #[test]
    fn commit_removes_interval() {
        let mut cand = Candidate {
            scale: 4,
            active: vec![(0, 1), (1, 1)],
            residual: ResidualTarget::exact(9),
            commitments: Commitments::default(),
        };
        cand.commit(0, Commitment::Fixed { value: 2, multiplicity: 1 });
        assert_eq!(cand.active, vec![(1, 1)]);
        assert_eq!(cand.residual, ResidualTarget::exact(7));
        assert_eq!(cand.subset_size(), 2);
    }
}
