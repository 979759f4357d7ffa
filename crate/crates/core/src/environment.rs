//! I.i.d. Dirichlet environments on `Z^d`.
//!
//! An environment is never stored globally. The transition vector at a site
//! is a pure function of `(seed, site)`: the site coordinates key a
//! counter-based stream, and the vector is drawn from it as normalized gamma
//! variates. Walks cache the vectors they touch, but recomputing a vector
//! always gives bit-identical output.

use std::collections::HashMap;

use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{JumpLaw, Site};
use crate::rational::{weight_to_f64, Weight};
use crate::rng::{stream, stream_key, TAG_SITE_ENV, TAG_TRIAL_ENV};

/// Master seed of one environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnvSeed {
    pub master: u64,
}

impl EnvSeed {
    pub fn new(master: u64) -> Self {
        EnvSeed { master }
    }

    /// Fresh environment for an annealed trial.
    pub fn for_trial(self, trial: u64) -> EnvSeed {
        EnvSeed { master: stream_key(self.master, TAG_TRIAL_ENV, [trial]) }
    }
}

/// Transition probabilities at one site, aligned with the jump list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteDistribution {
    pub probs: Vec<f64>,
}

impl SiteDistribution {
    /// Inverse-CDF selection from a uniform `u` in `[0, 1)`, scanning in
    /// jump order.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // rounding left u above the last partial sum
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Gamma samplers for a fixed parameter vector.
#[derive(Debug, Clone)]
pub struct DirichletSampler {
    gammas: Vec<Gamma<f64>>,
}

impl DirichletSampler {
    pub fn new(weights: &[Weight]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("Dirichlet parameter vector is empty".into()));
        }
        let gammas = weights
            .iter()
            .map(|w| {
                if *w <= Weight::zero() {
                    return Err(Error::InvalidParameter(format!(
                        "Dirichlet weight must be positive, got {w}"
                    )));
                }
                Gamma::new(weight_to_f64(w), 1.0)
                    .map_err(|e| Error::InvalidParameter(format!("gamma shape {w}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DirichletSampler { gammas })
    }

    /// Draws a point of the open simplex as normalized gamma variates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SiteDistribution {
        if self.gammas.len() == 1 {
            return SiteDistribution { probs: vec![1.0] };
        }
        let mut probs: Vec<f64> = Vec::with_capacity(self.gammas.len());
        // Tiny shapes can underflow a variate to zero; redraw a few times,
        // then clamp to the smallest positive float.
        for _ in 0..16 {
            probs.clear();
            probs.extend(self.gammas.iter().map(|g| g.sample(rng)));
            if probs.iter().all(|&p| p > 0.0) {
                break;
            }
        }
        for p in probs.iter_mut() {
            *p = p.max(f64::MIN_POSITIVE);
        }
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        SiteDistribution { probs }
    }
}

/// Draws one Dirichlet vector with the given parameters.
pub fn dirichlet_draw<R: Rng + ?Sized>(weights: &[Weight], rng: &mut R) -> Result<SiteDistribution> {
    Ok(DirichletSampler::new(weights)?.sample(rng))
}

/// Law of an i.i.d. Dirichlet environment on `Z^d`.
#[derive(Debug, Clone)]
pub struct DirichletLaw {
    law: JumpLaw,
    sampler: DirichletSampler,
}

impl DirichletLaw {
    pub fn new(law: JumpLaw) -> Result<Self> {
        let weights: Vec<Weight> = law.jumps().iter().map(|j| j.alpha).collect();
        let sampler = DirichletSampler::new(&weights)?;
        Ok(DirichletLaw { law, sampler })
    }

    pub fn law(&self) -> &JumpLaw {
        &self.law
    }

    pub fn sampler(&self) -> &DirichletSampler {
        &self.sampler
    }

    pub fn dim(&self) -> usize {
        self.law.dim()
    }
}

/// Transition vector at `x` in the environment keyed by `seed`.
pub fn site_distribution(dlaw: &DirichletLaw, seed: EnvSeed, x: &Site) -> SiteDistribution {
    let mut rng = stream(seed.master, TAG_SITE_ENV, x.coords().iter().map(|&c| c as u64));
    dlaw.sampler.sample(&mut rng)
}

/// Annealed drift `Σ_y y α_y / Σα`, exact.
pub fn annealed_drift_exact(dlaw: &DirichletLaw) -> Vec<Weight> {
    let law = dlaw.law();
    let total = law.total_weight();
    let mut drift = vec![Weight::zero(); law.dim()];
    for j in law.jumps() {
        for (acc, &c) in drift.iter_mut().zip(j.step.coords()) {
            *acc += j.alpha * Weight::from_integer(c as i128);
        }
    }
    drift.into_iter().map(|v| v / total).collect()
}

/// Annealed drift converted to floats.
pub fn annealed_drift(dlaw: &DirichletLaw) -> Vec<f64> {
    annealed_drift_exact(dlaw).iter().map(weight_to_f64).collect()
}

/// Lazily materialized quenched environment.
#[derive(Debug)]
pub struct Environment<'a> {
    dlaw: &'a DirichletLaw,
    seed: EnvSeed,
    cache: HashMap<Site, SiteDistribution>,
}

impl<'a> Environment<'a> {
    pub fn new(dlaw: &'a DirichletLaw, seed: EnvSeed) -> Self {
        Environment { dlaw, seed, cache: HashMap::new() }
    }

    pub fn law(&self) -> &'a DirichletLaw {
        self.dlaw
    }

    pub fn seed(&self) -> EnvSeed {
        self.seed
    }

    pub fn at(&mut self, x: &Site) -> &SiteDistribution {
        let (dlaw, seed) = (self.dlaw, self.seed);
        self.cache
            .entry(x.clone())
            .or_insert_with(|| site_distribution(dlaw, seed, x))
    }

    /// Number of sites materialized so far.
    pub fn touched(&self) -> usize {
        self.cache.len()
    }
}
