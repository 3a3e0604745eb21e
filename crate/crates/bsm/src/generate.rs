//! Seeded random instances.

use bsm_core::instance::MAX_VALUE;
use bsm_core::Instance;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetMode {
    /// Target is the sum of a random nonempty subset of the elements: of
    /// the given size, or a uniformly chosen subset when `None`.
    Planted(Option<usize>),
    /// Target uniform in `[1, Σ elements]`.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Elements are drawn from `[1, 2^bits − 1]`.
    pub bits: u32,
    pub seed: u64,
    pub target_mode: TargetMode,
    pub require_distinct: bool,
}

impl GeneratorConfig {
    /// `n / bits`.
    pub fn density(&self) -> f64 {
        self.n as f64 / self.bits as f64
    }

    pub fn max_value(&self) -> u64 {
        (1u64 << self.bits) - 1
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::NoElements);
        }
        if self.bits == 0 || (1u64 << self.bits.min(63)) - 1 > MAX_VALUE {
            return Err(ConfigError::Bits(self.bits));
        }
        if self.require_distinct && self.n as u64 > self.max_value() {
            return Err(ConfigError::NotEnoughValues { n: self.n, bits: self.bits });
        }
        if let TargetMode::Planted(Some(k)) = self.target_mode {
            if k == 0 || k > self.n {
                return Err(ConfigError::PlantedSize { size: k, n: self.n });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("n must be at least 1")]
    NoElements,
    #[error("bits must be between 1 and 48, got {0}")]
    Bits(u32),
    #[error("{n} distinct values do not fit below 2^{bits}")]
    NotEnoughValues { n: usize, bits: u32 },
    #[error("planted subset size {size} is outside 1..={n}")]
    PlantedSize { size: usize, n: usize },
}

pub fn generate_instance(config: &GeneratorConfig) -> Result<Instance, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max = config.max_value();
    let elements: Vec<u64> = if config.require_distinct {
        index::sample(&mut rng, max as usize, config.n).into_iter().map(|i| i as u64 + 1).collect()
    } else {
        (0..config.n).map(|_| rng.gen_range(1..=max)).collect()
    };
    let target = match config.target_mode {
        TargetMode::Planted(Some(k)) => index::sample(&mut rng, config.n, k).into_iter().map(|i| elements[i]).sum(),
        TargetMode::Planted(None) => loop {
            let picked: Vec<u64> = elements.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if !picked.is_empty() {
                break picked.iter().sum();
            }
        },
        TargetMode::UniformRandom => rng.gen_range(1..=elements.iter().sum::<u64>()),
    };
    Ok(Instance::new(elements, target).expect("generated values are within limits"))
}
