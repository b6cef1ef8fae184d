//! Repeated trials with seeded initial-state perturbations.

use super::metrics::TrialStats;
use super::{ExperimentError, Setup};

/// Runs `scenario` once per trial on a perturbed copy of `setup` and
/// collects the figures it returns. Each inner vector holds one figure
/// across all trials.
pub fn run_trials<F>(setup: &Setup, mut scenario: F) -> Result<Vec<TrialStats>, ExperimentError>
where
    F: FnMut(&Setup) -> Result<Vec<f64>, ExperimentError>,
{
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for i in 0..setup.trials {
        let values = scenario(&setup.perturbed(i))?;
        if columns.is_empty() {
            columns = vec![Vec::with_capacity(setup.trials); values.len()];
        }
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    Ok(columns.iter().map(|c| TrialStats::from_values(c)).collect())
}
