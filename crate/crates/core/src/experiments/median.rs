use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lattice::{prec_compare, Direction, Site};

/// A sample value `z` with at most half the samples strictly `≺`-below it
/// and at most half strictly above. Ties go to the `≺`-smallest candidate.
pub fn empirical_median(samples: &[Site], dir: &Direction) -> Result<Site> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    // validates dimensions once, so the sort below cannot fail
    for s in samples {
        prec_compare(s, s, dir)?;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|x, y| prec_compare(x, y, dir).unwrap_or(Ordering::Equal));
    let n = sorted.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted[end] == sorted[start] {
            end += 1;
        }
        let below = start;
        let above = n - end;
        if 2 * below <= n && 2 * above <= n {
            return Ok(sorted[start].clone());
        }
        start = end;
    }
    unreachable!("a weighted median always exists")
}
