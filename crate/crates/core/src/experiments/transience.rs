use serde::{Deserialize, Serialize};

use super::{run_trials, EstimateResult};
use crate::environment::{DirichletLaw, EnvSeed};
use crate::error::{Error, Result};
use crate::lattice::{Cmp, Direction, Site};
use crate::walk::{run_walk, StopReason, StopRule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransienceTrial {
    pub trial: u64,
    pub steps: u64,
    pub stop_reason: StopReason,
    pub escaped: bool,
}

/// Estimates `P^0(T_{>=b} < T_{<0} ∧ horizon)` under the annealed law.
/// Walks cut by the horizon count as failures and are also reported as
/// censored.
///
/// Uses the same trial streams for every `b`, so estimates for increasing
/// thresholds are non-increasing.
pub fn estimate_transience(
    dlaw: &DirichletLaw,
    dir: &Direction,
    b: f64,
    horizon: u64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(EstimateResult, Vec<TransienceTrial>)> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold b must be positive, got {b}")));
    }
    let rule = StopRule::horizon(horizon)
        .with_half_space(dir.clone(), Cmp::Ge, b)
        .with_half_space(dir.clone(), Cmp::Lt, 0.0);
    let origin = Site::origin(dlaw.dim());
    let master = EnvSeed::new(seed);
    let records = run_trials(0..trials, workers, |trial| {
        run_walk(dlaw, master.for_trial(trial), trial, &origin, &rule).map(|rec| TransienceTrial {
            trial,
            steps: rec.steps() as u64,
            stop_reason: rec.stop_reason,
            escaped: rec.stop_reason == StopReason::HalfSpace(0),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let hits = records.iter().filter(|r| r.escaped).count() as u64;
    let censored = records.iter().filter(|r| r.stop_reason == StopReason::Horizon).count() as u64;
    Ok((EstimateResult::over_all_trials(hits, trials, censored), records))
}
