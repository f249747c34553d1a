//! Running a configuration end to end.

use rayon::prelude::*;

use lieflow_core::report::CheckReport;

use crate::checks::{find, run_check};
use crate::config::{ConfigError, RunConfig};

/// Command-line adjustments applied on top of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tolerance_scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            tolerance_scale: 1.0,
        }
    }
}

/// Runs the configured checks in parallel and returns their reports in
/// configuration order.
pub fn run_suite(config: &RunConfig, options: RunOptions) -> Result<Vec<CheckReport>, ConfigError> {
    if !(options.tolerance_scale > 0.0) || !options.tolerance_scale.is_finite() {
        return Err(ConfigError::Invalid(format!(
            "tolerance scale must be positive, got {}",
            options.tolerance_scale
        )));
    }
    let mut config = config.clone();
    if let Some(seed) = options.seed {
        config.sampling.seed = seed;
    }
    let names = config.check_names()?;
    let scenario = config.resolve()?;
    let reports = names
        .par_iter()
        .map(|name| {
            let spec = find(name).expect("validated");
            let base = config.tolerances.get(name).copied().unwrap_or(spec.tolerance);
            run_check(spec, &scenario, base * options.tolerance_scale)
        })
        .collect();
    Ok(reports)
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}
