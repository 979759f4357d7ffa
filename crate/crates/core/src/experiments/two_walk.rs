//! Two walks in one environment: the first from the origin towards
//! `{x·ℓ >= 2L}`, the second from the median exit point `z_L` towards
//! `{x·ℓ <= -L}`. Each uncensored trial is classified into the
//! opposite-sides, intersection and proximity events, and the implication
//! `G_0^{2L} × G_{x_L}^{-L} ⇒ O ∪ P` is checked sample by sample.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{empirical_median, run_trials};
use crate::environment::{DirichletLaw, EnvSeed};
use crate::erasure::event_g;
use crate::error::{Error, Result};
use crate::lattice::{first_hit, Cmp, Direction, Site};
use crate::rng::derive_seed;
use crate::walk::{run_two_walks, run_walk, StopRule, WalkRecord};

/// Classification of one two-walk trial. `opposite`, `intersect` and
/// `proximity` are only ever set when `g_both` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TwoWalkClass {
    pub g_walk1: bool,
    pub g_walk2: bool,
    pub g_both: bool,
    pub opposite: bool,
    pub intersect: bool,
    pub proximity: bool,
}

impl TwoWalkClass {
    /// `g_both` without `O` or `P`.
    pub fn violates_decomposition(&self) -> bool {
        self.g_both && !self.opposite && !self.proximity
    }
}

/// Classifies a pair of records, or returns `None` if either was censored.
///
/// `radius_sq` is `R^2`; proximity means some pair of visited sites is at
/// squared distance at most `4R^2`, boundary included.
pub fn classify_two_walk(
    rec1: &WalkRecord,
    rec2: &WalkRecord,
    dir: &Direction,
    l: f64,
    z_l: &Site,
    radius_sq: i64,
) -> Result<Option<TwoWalkClass>> {
    if rec1.censored() || rec2.censored() {
        return Ok(None);
    }
    let x_l = dir.along(z_l);
    let g_walk1 = event_g(&rec1.path, dir, 0.0, 2.0 * l)?;
    let g_walk2 = event_g(&rec2.path, dir, x_l, -l)?;
    let mut class = TwoWalkClass { g_walk1, g_walk2, g_both: g_walk1 && g_walk2, ..Default::default() };
    if !class.g_both {
        return Ok(Some(class));
    }

    let t1 = first_hit(&rec1.path, dir, Cmp::Ge, 2.0 * l).expect("G_0^{2L} implies the hit");
    let t2 = first_hit(&rec2.path, dir, Cmp::Le, -l).expect("G^{-L} implies the hit");
    let path1 = &rec1.path.sites()[..=t1];
    let path2 = &rec2.path.sites()[..=t2];

    let exit1 = &path1[t1];
    let t2_zero = first_hit(&rec2.path, dir, Cmp::Le, 0.0).expect("reaching -L passes 0");
    let cross2 = &path2[t2_zero];
    let side1 = dir.lateral(exit1)? - dir.lateral(z_l)?;
    let side2 = dir.lateral(cross2)?;
    class.opposite = side1 * side2 < 0.0;

    let visited1: HashSet<&Site> = path1.iter().collect();
    class.intersect = path2.iter().any(|s| visited1.contains(s));
    class.proximity = class.intersect || within_sq_distance(path1, path2, 4 * radius_sq);
    Ok(Some(class))
}

/// Whether some `x ∈ a`, `y ∈ b` satisfy `|x - y|^2 <= bound_sq`, using a
/// bucket grid with cells at least as wide as the bound.
fn within_sq_distance(a: &[Site], b: &[Site], bound_sq: i64) -> bool {
    let cell = ((bound_sq as f64).sqrt().ceil() as i64).max(1);
    let key = |s: &Site| (s.coords()[0].div_euclid(cell), s.coords()[1].div_euclid(cell));
    let mut grid: HashMap<(i64, i64), Vec<&Site>> = HashMap::new();
    for s in a {
        grid.entry(key(s)).or_default().push(s);
    }
    b.iter().any(|y| {
        let (cx, cy) = key(y);
        (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                grid.get(&(cx + dx, cy + dy))
                    .is_some_and(|v| v.iter().any(|x| x.sub(y).norm_sq() <= bound_sq))
            })
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub l: f64,
    pub trials: u64,
    pub seed: u64,
    pub horizon: u64,
    pub workers: usize,
    /// Uncensored `G_0^{2L}` samples used to pick `z_L`.
    pub pilot_samples: usize,
    /// Use this `z_L` instead of running a pilot.
    pub z_l: Option<Site>,
}

impl DecompositionConfig {
    pub fn new(l: f64, trials: u64, seed: u64) -> Self {
        DecompositionConfig { l, trials, seed, horizon: 20_000, workers: 1, pilot_samples: 1000, z_l: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecompositionCounts {
    pub trials: u64,
    pub censored: u64,
    pub g_both: u64,
    pub opposite: u64,
    pub intersect: u64,
    pub proximity: u64,
    /// `g_both` but neither `O` nor `P`.
    pub violations: u64,
    /// `I` without `P`.
    pub intersect_without_proximity: u64,
    /// `O`, `I` or `P` without `g_both`.
    pub class_without_g: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub z_l: Site,
    pub x_l: f64,
    pub counts: DecompositionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoWalkTrial {
    pub trial: u64,
    pub steps: [u64; 2],
    pub stop_reasons: [crate::walk::StopReason; 2],
    /// `None` when censored.
    pub class: Option<TwoWalkClass>,
}

/// Chooses `z_L` as the `≺`-median of `X_{T_{>=2L}}` over uncensored pilot
/// walks from the origin that realize `G_0^{2L}`. Pilot trials run in
/// fixed-size chunks until enough samples are collected; the first
/// `samples` in trial order are used.
pub fn pilot_median(
    dlaw: &DirichletLaw,
    dir: &Direction,
    l: f64,
    samples: usize,
    seed: u64,
    horizon: u64,
    workers: usize,
) -> Result<Site> {
    const CHUNK: u64 = 2048;
    const MAX_CHUNKS: u64 = 4096;
    let master = EnvSeed::new(derive_seed(seed, "pilot"));
    let rule = StopRule::horizon(horizon).with_half_space(dir.clone(), Cmp::Ge, 2.0 * l);
    let origin = Site::origin(dlaw.dim());
    let mut found = Vec::with_capacity(samples);
    for chunk in 0..MAX_CHUNKS {
        let exits = run_trials(chunk * CHUNK..(chunk + 1) * CHUNK, workers, |trial| -> Result<Option<Site>> {
            let rec = run_walk(dlaw, master.for_trial(trial), trial, &origin, &rule)?;
            if rec.censored() || !event_g(&rec.path, dir, 0.0, 2.0 * l)? {
                return Ok(None);
            }
            Ok(Some(rec.final_site().clone()))
        });
        for e in exits {
            if let Some(s) = e? {
                found.push(s);
            }
        }
        if found.len() >= samples {
            found.truncate(samples);
            return empirical_median(&found, dir);
        }
    }
    Err(Error::InvalidParameter(format!(
        "pilot found only {} of {samples} samples of G_0^2L",
        found.len()
    )))
}

/// Runs the two-walk experiment and tallies the event classes.
pub fn decomposition_report(
    dlaw: &DirichletLaw,
    dir: &Direction,
    cfg: &DecompositionConfig,
) -> Result<(DecompositionReport, Vec<TwoWalkTrial>)> {
    if dlaw.dim() != 2 {
        return Err(Error::UnsupportedDimension(dlaw.dim()));
    }
    if !(cfg.l > 0.0) {
        return Err(Error::InvalidParameter(format!("L must be positive, got {}", cfg.l)));
    }
    let z_l = match &cfg.z_l {
        Some(z) => z.clone(),
        None => pilot_median(dlaw, dir, cfg.l, cfg.pilot_samples, cfg.seed, cfg.horizon, cfg.workers)?,
    };
    let x_l = dir.along(&z_l);
    if x_l < 2.0 * cfg.l {
        return Err(Error::InvalidParameter(format!("z_L = {z_l} lies below 2L")));
    }

    let rule1 = StopRule::horizon(cfg.horizon).with_half_space(dir.clone(), Cmp::Ge, 2.0 * cfg.l);
    let rule2 = StopRule::horizon(cfg.horizon).with_half_space(dir.clone(), Cmp::Le, -cfg.l);
    let master = EnvSeed::new(derive_seed(cfg.seed, "two-walk"));
    let origin = Site::origin(2);
    let radius_sq = dlaw.law().radius_sq();

    let records = run_trials(0..cfg.trials, cfg.workers, |trial| -> Result<TwoWalkTrial> {
        let (r1, r2) = run_two_walks(dlaw, master.for_trial(trial), trial, &origin, &z_l, &rule1, &rule2)?;
        let class = classify_two_walk(&r1, &r2, dir, cfg.l, &z_l, radius_sq)?;
        Ok(TwoWalkTrial {
            trial,
            steps: [r1.steps() as u64, r2.steps() as u64],
            stop_reasons: [r1.stop_reason, r2.stop_reason],
            class,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut c = DecompositionCounts { trials: cfg.trials, ..Default::default() };
    for r in &records {
        let Some(k) = r.class else {
            c.censored += 1;
            continue;
        };
        c.g_both += k.g_both as u64;
        c.opposite += k.opposite as u64;
        c.intersect += k.intersect as u64;
        c.proximity += k.proximity as u64;
        c.violations += k.violates_decomposition() as u64;
        c.intersect_without_proximity += (k.intersect && !k.proximity) as u64;
        c.class_without_g += ((k.opposite || k.intersect || k.proximity) && !k.g_both) as u64;
    }
    Ok((DecompositionReport { z_l, x_l, counts: c }, records))
}
