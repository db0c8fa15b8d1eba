//! Configuration, runners and output for the `atomchain` experiment binary.

pub mod config;
pub mod output;
pub mod runners;
pub mod search;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use output::{Cell, RunRecord, Table};
pub use runners::run;

/// Worker count when neither the flag nor the config sets one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
