//! Monte Carlo estimators and per-sample property checks.
//!
//! Every estimator splits trials by index. Trial `i` derives its environment
//! and step streams from `(seed, i)` alone, so results do not depend on the
//! number of workers.

mod agreement;
mod ineq;
mod loop_reversal;
mod median;
mod transience;
mod two_walk;

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use agreement::{erasure_agreement, random_erasure_case, AgreementReport, AgreementTrial, ErasureCase};
pub use ineq::{inequality_804_report, Ineq804Report, Ineq804Trial};
pub use loop_reversal::{verify_loop_reversal, LoopReversalReport, LoopReversalRow, ReturnTrial};
pub use median::empirical_median;
pub use transience::{estimate_transience, TransienceTrial};
pub use two_walk::{
    classify_two_walk, decomposition_report, pilot_median, DecompositionConfig, DecompositionCounts,
    DecompositionReport, TwoWalkClass, TwoWalkTrial,
};

/// A proportion estimated from uncensored trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimate: f64,
    /// All trials, censored or not.
    pub trials: u64,
    pub std_error: f64,
    /// Trials stopped by the horizon, excluded from the estimate.
    pub censored: u64,
}

impl EstimateResult {
    pub fn from_counts(successes: u64, trials: u64, censored: u64) -> Self {
        let n = trials.saturating_sub(censored);
        let (estimate, std_error) = if n == 0 {
            (0.0, 0.0)
        } else {
            let p = successes as f64 / n as f64;
            (p, (p * (1.0 - p) / n as f64).sqrt())
        };
        EstimateResult { estimate, trials, std_error, censored }
    }

    /// Proportion over all trials, counting censored trials as failures.
    pub fn over_all_trials(successes: u64, trials: u64, censored: u64) -> Self {
        EstimateResult { censored, ..Self::from_counts(successes, trials, 0) }
    }

    pub fn uncensored(&self) -> u64 {
        self.trials - self.censored
    }

    /// `|estimate - target| <= k·SE`, with the standard error evaluated at
    /// the target so that an estimate of exactly 0 or 1 is not trivially
    /// accepted.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        let n = self.uncensored().max(1) as f64;
        let se = (target * (1.0 - target) / n).sqrt().max(self.std_error);
        (self.estimate - target).abs() <= k * se
    }
}

/// Evaluates `f` on every trial index, on `workers` threads, in index order.
pub fn run_trials<T, F>(range: Range<u64>, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if workers <= 1 {
        return range.map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| range.into_par_iter().map(&f).collect()),
        Err(_) => range.map(f).collect(),
    }
}
