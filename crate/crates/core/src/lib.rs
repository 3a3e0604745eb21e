//! Deterministic Subset Sum solving by multi-scale interval refinement.
//!
//! The range `[1, R]` holding every element is cut into intervals of equal
//! width, each carrying a *coefficient*: how many elements a candidate
//! selects from it. Candidates that survive the population test and the
//! interval-arithmetic target envelope are split as the interval width
//! halves, until every interval is resolved to concrete selections.
//!
//! The crate is `no_std` (with `alloc`); file formats, instance generation
//! and the command line live in the companion `bsm` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod candidate;
pub mod engine;
pub mod instance;
pub mod metrics;
pub mod partition;
pub mod readout;
pub mod rules;

pub use candidate::{Candidate, Commitment, ResidualTarget};
pub use engine::{
    deviation_bound, population_test, run_stages, seed_candidates, split_candidate, target_bound_test, EngineError,
    EngineOptions, EngineOutcome, Mode,
};
pub use instance::{compute_range, Instance, InstanceError};
pub use metrics::{Metrics, Rule, RuleFirings};
pub use partition::{Interval, IntervalPartition};
pub use readout::{
    decide, enumerate_all, is_exact, optimize, reconstruct, Capped, Enumeration, Optimum, Solution, SolutionSet,
};
pub use rules::RuleSet;
