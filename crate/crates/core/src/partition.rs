//! Equal-width interval partitions of `[1, R]`.
//!
//! At scale `j` interval `k` (0-based) covers `[k*j + 1, (k+1)*j]`, so
//! interval `k` at scale `j` splits into intervals `2k` and `2k+1` at `j/2`.
//! Only populated intervals are stored: at unit scale `R` can be far larger
//! than the element count.

use alloc::vec::Vec;

/// One populated interval of a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub index: u64,
    pub lower: u64,
    pub upper: u64,
    /// Range into the partition's sorted element array.
    start: usize,
    end: usize,
    /// Sum of the elements inside, with multiplicity.
    pub sum: u64,
}

impl Interval {
    pub fn population(&self) -> u32 {
        (self.end - self.start) as u32
    }

    pub fn diameter(&self) -> u64 {
        self.upper - self.lower + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    range: u64,
    scale: u64,
    sorted: Vec<u64>,
    intervals: Vec<Interval>,
}

impl IntervalPartition {
    /// Buckets `elements` into intervals of width `scale` over `[1, range]`.
    ///
    /// # Panics
    ///
    /// If `range` or `scale` is not a power of two, `scale > range`, or an
    /// element lies outside `[1, range]`.
    pub fn build(range: u64, scale: u64, elements: &[u64]) -> Self {
        assert!(range.is_power_of_two() && scale.is_power_of_two(), "range and scale must be powers of two");
        assert!(scale <= range, "scale {scale} does not divide range {range}");
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        Self::from_sorted(range, scale, sorted)
    }

    fn from_sorted(range: u64, scale: u64, sorted: Vec<u64>) -> Self {
        let mut intervals: Vec<Interval> = Vec::new();
        for (pos, &e) in sorted.iter().enumerate() {
            assert!(e >= 1 && e <= range, "element {e} outside [1, {range}]");
            let index = (e - 1) / scale;
            match intervals.last_mut() {
                Some(iv) if iv.index == index => {
                    iv.end = pos + 1;
                    iv.sum += e;
                }
                _ => intervals.push(Interval {
                    index,
                    lower: index * scale + 1,
                    upper: (index + 1) * scale,
                    start: pos,
                    end: pos + 1,
                    sum: e,
                }),
            }
        }
        IntervalPartition { range, scale, sorted, intervals }
    }

    /// The partition at half the width.
    pub fn refine(&self) -> Self {
        assert!(self.scale > 1, "cannot refine below unit scale");
        Self::from_sorted(self.range, self.scale / 2, self.sorted.clone())
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Total number of intervals, populated or not (`R / j`).
    pub fn interval_count(&self) -> u64 {
        self.range / self.scale
    }

    /// Populated intervals in ascending order.
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, index: u64) -> Option<&Interval> {
        self.intervals
            .binary_search_by_key(&index, |iv| iv.index)
            .ok()
            .map(|pos| &self.intervals[pos])
    }

    pub fn population(&self, index: u64) -> u32 {
        self.interval(index).map_or(0, Interval::population)
    }

    /// Sorted elements of interval `index` (empty if unpopulated).
    pub fn elements(&self, index: u64) -> &[u64] {
        self.interval(index).map_or(&[], |iv| &self.sorted[iv.start..iv.end])
    }

    pub fn elements_of(&self, interval: &Interval) -> &[u64] {
        &self.sorted[interval.start..interval.end]
    }

    /// Lower and upper bound of interval `index`, populated or not.
    pub fn bounds(&self, index: u64) -> (u64, u64) {
        (index * self.scale + 1, (index + 1) * self.scale)
    }

    pub fn element_count(&self) -> usize {
        self.sorted.len()
    }
}
