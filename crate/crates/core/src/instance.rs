//! Problem input: a multiset of positive integers and a positive target.

use alloc::vec::Vec;
use core::fmt;

/// Largest accepted element or target value (2^48 − 1).
///
/// Interval bounds are multiplied by coefficients and summed in `i64`; with
/// at most [`MAX_ELEMENTS`] elements below 2^48 every such product and sum
/// stays below 2^60.
pub const MAX_VALUE: u64 = (1 << 48) - 1;

/// Largest accepted element count.
pub const MAX_ELEMENTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    NoElements,
    ZeroElement { position: usize },
    ZeroTarget,
    ValueTooLarge { value: u64 },
    TooManyElements { count: usize },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoElements => f.write_str("instance has no elements"),
            InstanceError::ZeroElement { position } => {
                write!(f, "element #{} is not a positive integer", position + 1)
            }
            InstanceError::ZeroTarget => f.write_str("target must be a positive integer"),
            InstanceError::ValueTooLarge { value } => {
                write!(f, "value {value} exceeds the supported maximum {MAX_VALUE}")
            }
            InstanceError::TooManyElements { count } => {
                write!(f, "{count} elements exceeds the supported maximum {MAX_ELEMENTS}")
            }
        }
    }
}

impl core::error::Error for InstanceError {}

/// A Subset Sum instance. Elements keep their input order; duplicates are
/// allowed and treated as a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    elements: Vec<u64>,
    target: u64,
    distinct: bool,
}

impl Instance {
    pub fn new(elements: Vec<u64>, target: u64) -> Result<Self, InstanceError> {
        if elements.is_empty() {
            return Err(InstanceError::NoElements);
        }
        if elements.len() > MAX_ELEMENTS {
            return Err(InstanceError::TooManyElements { count: elements.len() });
        }
        if let Some(position) = elements.iter().position(|&e| e == 0) {
            return Err(InstanceError::ZeroElement { position });
        }
        if target == 0 {
            return Err(InstanceError::ZeroTarget);
        }
        if let Some(&value) = elements.iter().chain(Some(&target)).find(|&&v| v > MAX_VALUE) {
            return Err(InstanceError::ValueTooLarge { value });
        }
        let mut sorted = elements.clone();
        sorted.sort_unstable();
        let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
        Ok(Instance { elements, target, distinct })
    }

    /// Elements in input order.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True iff all elements are pairwise distinct.
    pub fn is_distinct(&self) -> bool {
        self.distinct
    }

    pub fn max_element(&self) -> u64 {
        self.elements.iter().copied().max().unwrap_or(1)
    }

    pub fn total(&self) -> u64 {
        self.elements.iter().sum()
    }

    /// Elements sorted ascending (with repeats).
    pub fn sorted_elements(&self) -> Vec<u64> {
        let mut sorted = self.elements.clone();
        sorted.sort_unstable();
        sorted
    }

    /// `(value, multiplicity)` pairs, ascending by value.
    pub fn multiset(&self) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        for v in self.sorted_elements() {
            match out.last_mut() {
                Some((last, m)) if *last == v => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    pub fn multiplicity(&self, value: u64) -> u32 {
        self.elements.iter().filter(|&&e| e == value).count() as u32
    }

    /// The same elements with another target.
    pub fn with_target(&self, target: u64) -> Result<Self, InstanceError> {
        Instance::new(self.elements.clone(), target)
    }
}

/// Smallest power of two `R` with `R >= max(elements)`.
pub fn compute_range(instance: &Instance) -> u64 {
    instance.max_element().next_power_of_two()
}

/// Smallest power of two strictly greater than `max(elements)`.
pub fn compute_range_strict(instance: &Instance) -> u64 {
    (instance.max_element() + 1).next_power_of_two()
}
