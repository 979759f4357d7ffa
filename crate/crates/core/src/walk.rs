//! Quenched simulation of one or two walks sharing an environment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::{site_distribution, DirichletLaw, EnvSeed, Environment};
use crate::error::{Error, Result};
use crate::lattice::{first_hit, lateral_first_exit, Cmp, Direction, Site, WalkPath};
use crate::rng::{stream, TAG_WALK_STEPS};

/// Stop when `X_n·ℓ ⋄ a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceStop {
    pub dir: Direction,
    pub cmp: Cmp,
    pub a: f64,
}

/// Stop when `|X_n·ℓ^⊥| >= a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LateralStop {
    pub dir: Direction,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub horizon: u64,
    pub half_space_stops: Vec<HalfSpaceStop>,
    pub lateral_stop: Option<LateralStop>,
}

impl StopRule {
    pub fn horizon(horizon: u64) -> Self {
        StopRule { horizon, half_space_stops: Vec::new(), lateral_stop: None }
    }

    pub fn with_half_space(mut self, dir: Direction, cmp: Cmp, a: f64) -> Self {
        self.half_space_stops.push(HalfSpaceStop { dir, cmp, a });
        self
    }

    pub fn with_lateral(mut self, dir: Direction, a: f64) -> Self {
        self.lateral_stop = Some(LateralStop { dir, a });
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        for s in &self.half_space_stops {
            if s.dir.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dir.dim() });
            }
        }
        if let Some(l) = &self.lateral_stop {
            if dim != 2 || l.dir.dim() != 2 {
                return Err(Error::UnsupportedDimension(dim));
            }
        }
        Ok(())
    }

    fn triggered(&self, x: &Site) -> Option<StopReason> {
        if let Some(i) = self
            .half_space_stops
            .iter()
            .position(|s| s.cmp.holds(s.dir.along(x), s.a))
        {
            return Some(StopReason::HalfSpace(i));
        }
        match &self.lateral_stop {
            Some(l) if l.dir.lateral(x).is_ok_and(|v| v.abs() >= l.a) => Some(StopReason::Lateral),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    HalfSpace(usize),
    Lateral,
}

/// First-hit indices of every configured stop, recomputed on the path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitIndices {
    pub half_space: Vec<Option<usize>>,
    pub lateral: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub path: WalkPath,
    pub stop_reason: StopReason,
    pub hit_indices: HitIndices,
}

impl WalkRecord {
    pub fn censored(&self) -> bool {
        self.stop_reason == StopReason::Horizon
    }

    pub fn final_site(&self) -> &Site {
        self.path.last().expect("records are never empty")
    }

    pub fn steps(&self) -> usize {
        self.path.len() - 1
    }
}

pub(crate) fn hit_indices(path: &WalkPath, rule: &StopRule) -> HitIndices {
    HitIndices {
        half_space: rule
            .half_space_stops
            .iter()
            .map(|s| first_hit(path, &s.dir, s.cmp, s.a))
            .collect(),
        lateral: rule
            .lateral_stop
            .as_ref()
            .and_then(|l| lateral_first_exit(path, &l.dir, l.a).ok().flatten()),
    }
}

/// Step stream for walk `walk_id` of trial `trial`.
pub fn step_stream(seed: EnvSeed, trial: u64, walk_id: u64) -> rand_chacha::ChaCha8Rng {
    stream(seed.master, TAG_WALK_STEPS, [trial, walk_id])
}

/// Runs one walk in an already-open environment with a caller-supplied
/// step stream.
pub fn run_walk_in<R: Rng + ?Sized>(
    env: &mut Environment<'_>,
    steps: &mut R,
    start: &Site,
    rule: &StopRule,
) -> Result<WalkRecord> {
    let law = env.law().law();
    if start.dim() != law.dim() {
        return Err(Error::DimensionMismatch { expected: law.dim(), got: start.dim() });
    }
    rule.validate(law.dim())?;

    let mut sites = vec![start.clone()];
    let mut reason = rule.triggered(start);
    let mut x = start.clone();
    while reason.is_none() && (sites.len() as u64) <= rule.horizon {
        let u: f64 = steps.random();
        let k = env.at(&x).sample_index(u);
        x = x.add(&law.jumps()[k].step);
        reason = rule.triggered(&x);
        sites.push(x.clone());
    }
    let path = WalkPath(sites);
    let hit_indices = hit_indices(&path, rule);
    Ok(WalkRecord { path, stop_reason: reason.unwrap_or(StopReason::Horizon), hit_indices })
}

/// Walk from `start` in the environment keyed by `seed`, stepping with the
/// stream of `(seed, trial)`.
pub fn run_walk(
    dlaw: &DirichletLaw,
    seed: EnvSeed,
    trial: u64,
    start: &Site,
    rule: &StopRule,
) -> Result<WalkRecord> {
    let mut env = Environment::new(dlaw, seed);
    run_walk_in(&mut env, &mut step_stream(seed, trial, 0), start, rule)
}

/// Two independent walks in one environment (the product of the quenched
/// laws). Walk ids are `0` and `1`, so the first record coincides with
/// [`run_walk`] for the same arguments.
pub fn run_two_walks(
    dlaw: &DirichletLaw,
    seed: EnvSeed,
    trial: u64,
    start1: &Site,
    start2: &Site,
    rule1: &StopRule,
    rule2: &StopRule,
) -> Result<(WalkRecord, WalkRecord)> {
    run_two_walks_with_ids(dlaw, seed, trial, [0, 1], start1, start2, rule1, rule2)
}

#[allow(clippy::too_many_arguments)]
pub fn run_two_walks_with_ids(
    dlaw: &DirichletLaw,
    seed: EnvSeed,
    trial: u64,
    ids: [u64; 2],
    start1: &Site,
    start2: &Site,
    rule1: &StopRule,
    rule2: &StopRule,
) -> Result<(WalkRecord, WalkRecord)> {
    if ids[0] == ids[1] {
        return Err(Error::InvalidParameter("walk ids must differ".into()));
    }
    let mut env = Environment::new(dlaw, seed);
    let r1 = run_walk_in(&mut env, &mut step_stream(seed, trial, ids[0]), start1, rule1)?;
    let r2 = run_walk_in(&mut env, &mut step_stream(seed, trial, ids[1]), start2, rule2)?;
    Ok((r1, r2))
}

/// Quenched probability of every step taken along `path`.
pub fn step_probabilities(dlaw: &DirichletLaw, seed: EnvSeed, path: &WalkPath) -> Result<Vec<f64>> {
    path.sites()
        .windows(2)
        .map(|w| {
            let k = dlaw.law().index_of(&w[1].sub(&w[0])).ok_or_else(|| {
                Error::InvalidParameter(format!("step {} -> {} is not a jump", w[0], w[1]))
            })?;
            Ok(site_distribution(dlaw, seed, &w[0]).probs[k])
        })
        .collect()
}
