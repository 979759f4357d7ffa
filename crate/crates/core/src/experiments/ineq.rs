use serde::{Deserialize, Serialize};

use super::{run_trials, EstimateResult};
use crate::cylinder::Cylinder;
use crate::error::{Error, Result};
use crate::graph::{graph_samplers, GraphEnvKey, GraphWalker};
use crate::rng::derive_seed;

/// Monte Carlo check of
/// `1/2 <= 1/2·P^M(T̃_∂ = τ) + P^∂(X_1 != M, T_M < T̃_∂)`
/// on a zero-drift cylinder, where `τ` is the first arrival at `∂` along
/// the special edge from `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ineq804Report {
    pub lhs: f64,
    /// `P^M(T̃_∂ = τ)`.
    pub first_return_special: EstimateResult,
    /// `P^∂(X_1 != M, T_M < T̃_∂)`.
    pub detour_term: EstimateResult,
    /// `P^∂(T̃_∂ = τ)`, exactly 1/2 by loop reversal.
    pub boundary_return_special: EstimateResult,
    pub combined_std_error: f64,
    /// `1/2·p1 + p2 - 1/2`.
    pub slack: f64,
    /// Whether `lhs <= rhs + 4·combined_std_error`.
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ineq804Trial {
    pub estimate: &'static str,
    pub trial: u64,
    pub steps: u64,
    pub event: bool,
    pub censored: bool,
}

pub fn inequality_804_report(
    cyl: &Cylinder,
    trials: u64,
    seed: u64,
    horizon: u64,
    workers: usize,
) -> Result<(Ineq804Report, Vec<Ineq804Trial>)> {
    if !cyl.class_sums().all_equal() {
        return Err(Error::InvalidParameter(
            "the inequality report needs a zero-drift cylinder (unequal boundary class sums)".into(),
        ));
    }
    let g = cyl.graph();
    let (del, m) = (cyl.del(), cyl.m());
    let samplers = graph_samplers(g)?;

    let run = |label: &'static str, start, judge: &(dyn Fn(&[usize]) -> Option<bool> + Sync)| {
        let s = derive_seed(seed, label);
        run_trials(0..trials, workers, |trial| {
            let mut walker = GraphWalker::new(g, &samplers, GraphEnvKey { seed: s, trial });
            let (path, stopped) = walker.walk_until(start, horizon, |_, v| v == del || (start == del && v == m));
            let event = if stopped { judge(&path) } else { None };
            Ineq804Trial {
                estimate: label,
                trial,
                steps: path.len() as u64 - 1,
                event: event.unwrap_or(false),
                censored: event.is_none(),
            }
        })
    };
    // from M: stop at ∂, event = arrived from M
    let from_m = run("first_return_special", m, &|p| Some(p[p.len() - 2] == m));
    // from ∂: stop at ∂ or M, event = first step not to M and M reached first
    let detour = run("detour_term", del, &|p| Some(p[1] != m && *p.last().unwrap() == m));
    // from ∂: stop at ∂ only
    let s = derive_seed(seed, "boundary_return_special");
    let boundary = run_trials(0..trials, workers, |trial| {
        let mut walker = GraphWalker::new(g, &samplers, GraphEnvKey { seed: s, trial });
        let (path, stopped) = walker.walk_until(del, horizon, |_, v| v == del);
        Ineq804Trial {
            estimate: "boundary_return_special",
            trial,
            steps: path.len() as u64 - 1,
            event: stopped && path[path.len() - 2] == m,
            censored: !stopped,
        }
    });

    let summarize = |recs: &[Ineq804Trial]| {
        let hits = recs.iter().filter(|r| r.event).count() as u64;
        let censored = recs.iter().filter(|r| r.censored).count() as u64;
        EstimateResult::from_counts(hits, trials, censored)
    };
    let p1 = summarize(&from_m);
    let p2 = summarize(&detour);
    let p0 = summarize(&boundary);
    let combined = ((0.5 * p1.std_error).powi(2) + p2.std_error.powi(2)).sqrt();
    let rhs = 0.5 * p1.estimate + p2.estimate;
    let report = Ineq804Report {
        lhs: 0.5,
        first_return_special: p1,
        detour_term: p2,
        boundary_return_special: p0,
        combined_std_error: combined,
        slack: rhs - 0.5,
        satisfied: 0.5 <= rhs + 4.0 * combined,
    };
    let mut all = from_m;
    all.extend(detour);
    all.extend(boundary);
    Ok((report, all))
}
