//! Configuration-driven verification runs over `lieflow-core`.
//!
//! A run reads a TOML [`config::RunConfig`], resolves the flow and fields,
//! executes the selected [`checks`] in parallel and writes one series file
//! per check plus a summary.

pub mod catalog;
pub mod checks;
pub mod config;
pub mod output;
pub mod sampling;
pub mod suite;

pub use config::{ConfigError, Format, RunConfig};
pub use suite::{all_passed, run_suite, RunOptions};
