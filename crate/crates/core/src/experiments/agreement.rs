//! Cross-check of the `G_a^b` dynamic program against brute-force
//! enumeration of reachable loop erasures on short random paths.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::run_trials;
use crate::erasure::{event_g, event_g_bruteforce};
use crate::error::Result;
use crate::lattice::{Direction, Site, WalkPath};
use crate::rng::{derive_seed, stream};

/// Step alphabets with enough short loops to make erasures matter.
const ALPHABETS: [[[i64; 2]; 3]; 2] = [[[0, 1], [1, -1], [-2, 0]], [[1, 0], [-1, 0], [0, 1]]];

const MAX_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErasureCase {
    pub path: WalkPath,
    pub ell: [f64; 2],
    pub a: f64,
    pub b: f64,
}

/// Random path of at most `MAX_LEN` steps from the origin, a random unit
/// direction and thresholds `a != b` in either order.
pub fn random_erasure_case(seed: u64, trial: u64) -> ErasureCase {
    let mut rng = stream(derive_seed(seed, "erasure-agreement"), 0, [trial]);
    let alphabet = &ALPHABETS[rng.random_range(0..ALPHABETS.len())];
    let steps = rng.random_range(1..=MAX_LEN);
    let mut x = Site::origin(2);
    let mut sites = vec![x.clone()];
    for _ in 0..steps {
        x = x.add(&Site::from(alphabet[rng.random_range(0..3)]));
        sites.push(x.clone());
    }
    // axis directions half the time, so that ties on thresholds are common
    let theta = if rng.random_bool(0.5) {
        std::f64::consts::FRAC_PI_2 * rng.random_range(0..4) as f64
    } else {
        rng.random_range(0.0..std::f64::consts::TAU)
    };
    let ell = [theta.cos(), theta.sin()];
    let a = rng.random_range(-3i32..=3) as f64;
    let mut b = rng.random_range(-3i32..=3) as f64;
    if b == a {
        b = a + 1.0;
    }
    ErasureCase { path: WalkPath(sites), ell, a, b }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementTrial {
    pub trial: u64,
    pub len: usize,
    pub dp: bool,
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AgreementReport {
    pub trials: u64,
    pub positives: u64,
    pub disagreements: u64,
}

pub fn erasure_agreement(trials: u64, seed: u64, workers: usize) -> Result<(AgreementReport, Vec<AgreementTrial>)> {
    let rows = run_trials(0..trials, workers, |trial| -> Result<AgreementTrial> {
        let case = random_erasure_case(seed, trial);
        let dir = Direction::normalized(&case.ell)?;
        Ok(AgreementTrial {
            trial,
            len: case.path.len(),
            dp: event_g(&case.path, &dir, case.a, case.b)?,
            oracle: event_g_bruteforce(&case.path, &dir, case.a, case.b)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let report = AgreementReport {
        trials,
        positives: rows.iter().filter(|r| r.oracle).count() as u64,
        disagreements: rows.iter().filter(|r| r.dp != r.oracle).count() as u64,
    };
    Ok((report, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_reproducible_and_valid() {
        for t in 0..50 {
            let c = random_erasure_case(9, t);
            assert_eq!(c, random_erasure_case(9, t));
            assert_ne!(c.a, c.b);
            assert!(c.path.len() >= 2 && c.path.len() <= MAX_LEN + 1);
        }
    }

    #[test]
    fn small_run_agrees() {
        let (rep, _) = erasure_agreement(500, 1, 2).unwrap();
        assert_eq!(rep.disagreements, 0);
        assert!(rep.positives > 0 && rep.positives < rep.trials);
    }
}
