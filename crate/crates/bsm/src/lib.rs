//! File formats, instance generation, the benchmark harness and the
//! command line for [`bsm_core`].

pub mod bench;
pub mod cli;
pub mod format;
pub mod generate;

pub use bench::{run_bench, BenchConfig, BenchRow, BitsMode, Solver};
pub use format::{parse_instance, write_instance, FormatError};
pub use generate::{generate_instance, ConfigError, GeneratorConfig, TargetMode};
