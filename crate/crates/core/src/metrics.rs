//! Work counters reported by the engine.

use core::fmt;
use core::time::Duration;

/// Reduction rules, in the order the per-interval check tries them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Unit,
    Singleton,
    Filled,
    Block,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Unit, Rule::Singleton, Rule::Filled, Rule::Block];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Unit => "unit",
            Rule::Singleton => "singleton",
            Rule::Filled => "filled",
            Rule::Block => "block",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleFirings {
    pub unit: u64,
    pub singleton: u64,
    pub filled: u64,
    pub block: u64,
}

impl RuleFirings {
    pub fn record(&mut self, rule: Rule) {
        *self.slot(rule) += 1;
    }

    pub fn get(&self, rule: Rule) -> u64 {
        match rule {
            Rule::Unit => self.unit,
            Rule::Singleton => self.singleton,
            Rule::Filled => self.filled,
            Rule::Block => self.block,
        }
    }

    fn slot(&mut self, rule: Rule) -> &mut u64 {
        match rule {
            Rule::Unit => &mut self.unit,
            Rule::Singleton => &mut self.singleton,
            Rule::Filled => &mut self.filled,
            Rule::Block => &mut self.block,
        }
    }

    pub fn add(&mut self, other: &RuleFirings) {
        for rule in Rule::ALL {
            *self.slot(rule) += other.get(rule);
        }
    }
}

/// Counters for one engine run.
///
/// An *evaluation* is one coefficient combination put through the
/// population test and the target envelope test. Every counter is a pure
/// function of the instance and options; only `wall_time` is not, and the
/// engine itself never sets it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metrics {
    pub evaluations: u64,
    pub peak_live_candidates: u64,
    pub stages_executed: u64,
    pub rule_firings: RuleFirings,
    /// Finest scale at which any combination was evaluated (0 before the
    /// first evaluation).
    pub deepest_scale_reached: u64,
    pub solutions_found: u64,
    pub wall_time: Duration,
}

impl Metrics {
    pub(crate) fn reach_scale(&mut self, scale: u64) {
        if self.deepest_scale_reached == 0 || scale < self.deepest_scale_reached {
            self.deepest_scale_reached = scale;
        }
    }

    /// Fold another run's counters into this one (per-size schedules, the
    /// two optimize phases).
    pub fn absorb(&mut self, other: &Metrics) {
        self.evaluations += other.evaluations;
        self.peak_live_candidates = self.peak_live_candidates.max(other.peak_live_candidates);
        self.stages_executed += other.stages_executed;
        self.rule_firings.add(&other.rule_firings);
        if other.deepest_scale_reached != 0 {
            self.reach_scale(other.deepest_scale_reached);
        }
        self.solutions_found += other.solutions_found;
        self.wall_time += other.wall_time;
    }
}
