//! Loop erasures of finite walks.
//!
//! Erasing a loop removes `X_m, ..., X_{n-1}` where `X_m = X_n`. Any
//! sequence of erasures removes, in original indices, a laminar family of
//! such intervals, so every reachable erasure is described by a set of
//! disjoint intervals `[m_i, n_i)` with matching endpoint sites. Conversely,
//! any such disjoint family can be erased left to right. This gives a linear
//! dynamic program for the event `G_a^b`; [`reachable_erasures`] is the
//! exhaustive closure it is checked against.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{first_hit, Cmp, Direction, Site, WalkPath};

/// Largest path accepted by the exhaustive closure.
pub const CLOSURE_LIMIT: usize = 16;

/// Half-open range `[m, n)` of original indices with `X_m = X_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ErasureInterval {
    pub m: usize,
    pub n: usize,
}

impl ErasureInterval {
    pub fn new(m: usize, n: usize) -> Self {
        ErasureInterval { m, n }
    }

    pub fn validate(&self, path: &WalkPath) -> Result<()> {
        let err = |reason: &str| Error::InvalidInterval { m: self.m, n: self.n, reason: reason.into() };
        if self.m >= self.n {
            return Err(err("empty interval"));
        }
        if self.n >= path.len() {
            return Err(err("endpoint outside the path"));
        }
        if path.sites()[self.m] != path.sites()[self.n] {
            return Err(err("endpoint positions differ"));
        }
        Ok(())
    }
}

/// Pairwise disjoint erasure intervals sorted by left endpoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureFamily {
    pub intervals: Vec<ErasureInterval>,
}

impl ErasureFamily {
    pub fn new(mut intervals: Vec<ErasureInterval>) -> Result<Self> {
        intervals.sort();
        for w in intervals.windows(2) {
            if w[0].n > w[1].m {
                return Err(Error::InvalidInterval {
                    m: w[1].m,
                    n: w[1].n,
                    reason: format!("overlaps [{}, {})", w[0].m, w[0].n),
                });
            }
        }
        Ok(ErasureFamily { intervals })
    }

    pub fn is_removed(&self, idx: usize) -> bool {
        self.intervals.iter().any(|iv| iv.m <= idx && idx < iv.n)
    }

    /// Applies every interval to `path`.
    pub fn apply(&self, path: &WalkPath) -> Result<WalkPath> {
        for iv in &self.intervals {
            iv.validate(path)?;
        }
        Ok(WalkPath(
            path.sites()
                .iter()
                .enumerate()
                .filter(|(i, _)| !self.is_removed(*i))
                .map(|(_, s)| s.clone())
                .collect(),
        ))
    }
}

/// Erases one loop: `(X_0, ..., X_{m-1}, X_n, X_{n+1}, ...)`.
pub fn erase_interval(path: &WalkPath, iv: ErasureInterval) -> Result<WalkPath> {
    iv.validate(path)?;
    let s = path.sites();
    Ok(WalkPath(s[..iv.m].iter().chain(&s[iv.n..]).cloned().collect()))
}

/// The set `E(X) ∪ {X}` by exhaustive closure under single erasures.
///
/// Panics in debug and release if a closure state ever removes an index set
/// whose maximal runs do not have matching endpoints; that would falsify the
/// interval description the dynamic program relies on.
pub fn reachable_erasures(path: &WalkPath) -> Result<BTreeSet<WalkPath>> {
    let states = closure_states(path)?;
    Ok(states
        .iter()
        .map(|kept| WalkPath(kept.iter().map(|&i| path.sites()[i].clone()).collect()))
        .collect())
}

/// Closure over kept-index lists.
fn closure_states(path: &WalkPath) -> Result<HashSet<Vec<usize>>> {
    if path.len() > CLOSURE_LIMIT {
        return Err(Error::ScaleLimit { len: path.len(), limit: CLOSURE_LIMIT });
    }
    let sites = path.sites();
    let start: Vec<usize> = (0..sites.len()).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(kept) = queue.pop_front() {
        for p in 0..kept.len() {
            for q in p + 1..kept.len() {
                if sites[kept[p]] != sites[kept[q]] {
                    continue;
                }
                let next: Vec<usize> = kept[..p].iter().chain(&kept[q..]).copied().collect();
                assert_laminar(sites, &next);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen)
}

fn assert_laminar(sites: &[Site], kept: &[usize]) {
    for w in kept.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a + 1 {
            assert_eq!(
                sites[a + 1], sites[b],
                "removed run [{}, {b}) does not have matching endpoints",
                a + 1
            );
        }
    }
    if let Some(&first) = kept.first() {
        if first > 0 {
            assert_eq!(sites[0], sites[first], "removed run [0, {first}) does not have matching endpoints");
        }
    }
}

/// The two half-spaces involved in `G_a^b`.
#[derive(Debug, Clone, Copy)]
struct Sides {
    target: (Cmp, f64),
    bad: (Cmp, f64),
}

fn sides(a: f64, b: f64) -> Result<Sides> {
    if a < b {
        Ok(Sides { target: (Cmp::Ge, b), bad: (Cmp::Lt, a) })
    } else if a > b {
        Ok(Sides { target: (Cmp::Le, b), bad: (Cmp::Gt, a) })
    } else {
        Err(Error::InvalidParameter(format!("G_a^b needs a != b, got a = b = {a}")))
    }
}

/// Disjoint matched intervals covering every bad index before the first
/// target hit, or `None` if the event `G_a^b` fails on this path.
pub fn g_witness(path: &WalkPath, dir: &Direction, a: f64, b: f64) -> Result<Option<ErasureFamily>> {
    let sd = sides(a, b)?;
    let Some(t) = first_hit(path, dir, sd.target.0, sd.target.1) else {
        return Ok(None);
    };
    let sites = &path.sites()[..=t];
    let bad: Vec<bool> = sites.iter().map(|x| sd.bad.0.holds(dir.along(x), sd.bad.1)).collect();

    // reach[j]: every bad index < j is covered by disjoint matched intervals
    // ending at or before j, and j itself is kept.
    // from[j]: None if reached by keeping j-1, Some(i) if by erasing [i, j).
    let mut reach = vec![false; t + 1];
    let mut from: Vec<Option<usize>> = vec![None; t + 1];
    let mut earlier: HashMap<&Site, Vec<usize>> = HashMap::new();
    reach[0] = true;
    earlier.entry(&sites[0]).or_default().push(0);
    for j in 1..=t {
        if reach[j - 1] && !bad[j - 1] {
            reach[j] = true;
        } else if let Some(i) = earlier
            .get(&sites[j])
            .and_then(|v| v.iter().copied().find(|&i| reach[i]))
        {
            reach[j] = true;
            from[j] = Some(i);
        }
        earlier.entry(&sites[j]).or_default().push(j);
    }
    if !reach[t] {
        return Ok(None);
    }

    let mut intervals = Vec::new();
    let mut j = t;
    while j > 0 {
        match from[j] {
            Some(i) => {
                intervals.push(ErasureInterval::new(i, j));
                j = i;
            }
            None => j -= 1,
        }
    }
    intervals.reverse();
    Ok(Some(ErasureFamily::new(intervals)?))
}

/// The event `G_a^b`: the walk reaches the `b` side, and some loop erasure
/// of the prefix up to that hit reaches it before visiting the far side of
/// `a`.
pub fn event_g(path: &WalkPath, dir: &Direction, a: f64, b: f64) -> Result<bool> {
    Ok(g_witness(path, dir, a, b)?.is_some())
}

/// Finite-horizon proxy for `B_ℓ`, namely `G_0^b`.
///
/// A `false` may be censoring: the infinite event is undecidable from a
/// prefix.
pub fn event_b_horizon(path: &WalkPath, dir: &Direction, b: f64) -> Result<bool> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold b must be positive, got {b}")));
    }
    event_g(path, dir, 0.0, b)
}

/// Brute-force `G_a^b` via [`reachable_erasures`]. Only for short paths.
pub fn event_g_bruteforce(path: &WalkPath, dir: &Direction, a: f64, b: f64) -> Result<bool> {
    let sd = sides(a, b)?;
    let Some(t) = first_hit(path, dir, sd.target.0, sd.target.1) else {
        return Ok(false);
    };
    let prefix = path.prefix(t);
    Ok(reachable_erasures(&prefix)?.iter().any(|y| {
        let hit = first_hit(y, dir, sd.target.0, sd.target.1);
        let bad = first_hit(y, dir, sd.bad.0, sd.bad.1);
        match (hit, bad) {
            (Some(h), Some(b)) => h < b,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(pts: &[[i64; 2]]) -> WalkPath {
        WalkPath(pts.iter().map(|&p| Site::from(p)).collect())
    }

    fn p1(pts: &[i64]) -> WalkPath {
        WalkPath(pts.iter().map(|&p| Site::from([p])).collect())
    }

    fn e1() -> Direction {
        Direction::new(&[1.0, 0.0]).unwrap()
    }

    #[test]
    fn erase_examples() {
        let aba = p2(&[[0, 0], [1, 0], [0, 0]]);
        assert_eq!(erase_interval(&aba, ErasureInterval::new(0, 2)).unwrap(), p2(&[[0, 0]]));
        let abc = p2(&[[0, 0], [1, 0], [2, 0]]);
        for (m, n) in [(0, 1), (0, 2), (1, 2)] {
            assert!(erase_interval(&abc, ErasureInterval::new(m, n)).is_err());
        }
        let z = p1(&[0, -1, 0, 1]);
        assert_eq!(erase_interval(&z, ErasureInterval::new(0, 2)).unwrap(), p1(&[0, 1]));
        assert!(erase_interval(&z, ErasureInterval::new(2, 7)).is_err());
    }

    #[test]
    fn closure_examples() {
        let abc = p2(&[[0, 0], [1, 0], [2, 0]]);
        assert_eq!(reachable_erasures(&abc).unwrap(), BTreeSet::from([abc.clone()]));
        let aba = p2(&[[0, 0], [1, 0], [0, 0]]);
        assert_eq!(reachable_erasures(&aba).unwrap(), BTreeSet::from([aba.clone(), p2(&[[0, 0]])]));
        let z = p1(&[0, 1, 0, 1, 0]);
        let e = reachable_erasures(&z).unwrap();
        for want in [p1(&[0]), p1(&[0, 1, 0]), p1(&[0, 1, 0, 1, 0])] {
            assert!(e.contains(&want), "missing {want:?}");
        }
        // brute-force count: keep-lists (0), (0,1,2)=(0,1,0) and (0,3,4)=(0,1,0) etc.
        assert_eq!(e.len(), 3);
    }

    #[test]
    fn closure_limit() {
        let long = p1(&(0..17).collect::<Vec<_>>());
        assert!(matches!(reachable_erasures(&long), Err(Error::ScaleLimit { .. })));
    }

    #[test]
    fn g_examples() {
        let d = e1();
        let straight = p2(&[[0, 0], [1, 0], [2, 0]]);
        assert!(event_g(&straight, &d, 0.0, 2.0).unwrap());
        let dip = p2(&[[0, 0], [-1, 0], [1, 0], [2, 0]]);
        assert!(!event_g(&dip, &d, 0.0, 2.0).unwrap());
        assert!(!event_g_bruteforce(&dip, &d, 0.0, 2.0).unwrap());
        let looped = p2(&[[0, 0], [-1, 0], [0, 0], [1, 0], [2, 0]]);
        assert!(event_g(&looped, &d, 0.0, 2.0).unwrap());
        assert!(event_g_bruteforce(&looped, &d, 0.0, 2.0).unwrap());
        let w = g_witness(&looped, &d, 0.0, 2.0).unwrap().unwrap();
        assert_eq!(w.intervals, vec![ErasureInterval::new(0, 2)]);
    }

    #[test]
    fn g_mirrored_and_ties() {
        let d = e1();
        let left = p2(&[[5, 0], [6, 0], [5, 0], [3, 0], [1, 0]]);
        assert!(event_g(&left, &d, 5.0, 1.0).unwrap());
        let left_bad = p2(&[[5, 0], [6, 0], [4, 0], [1, 0]]);
        assert!(!event_g(&left_bad, &d, 5.0, 1.0).unwrap());
        assert!(event_g(&left, &d, 1.0, 1.0).is_err());
    }

    #[test]
    fn b_proxy() {
        let d = e1();
        assert!(event_b_horizon(&p2(&[[0, 0], [1, 0], [2, 0], [3, 0]]), &d, 3.0).unwrap());
        assert!(!event_b_horizon(&p2(&[[0, 0], [1, 0], [2, 0]]), &d, 3.0).unwrap());
        let dip = p2(&[[0, 0], [1, 0], [0, -1], [-1, -1], [0, -1], [1, 0], [2, 0], [3, 0]]);
        assert!(event_b_horizon(&dip, &d, 3.0).unwrap());
        assert!(event_g_bruteforce(&dip, &d, 0.0, 3.0).unwrap());
        assert!(event_b_horizon(&dip, &d, 0.0).is_err());
    }

    #[test]
    fn bad_start_is_never_erasable() {
        // erasing [0, n) keeps X_n = X_0, which is just as bad
        let d = e1();
        let p = p2(&[[-1, 0], [0, 0], [-1, 0], [0, 0], [1, 0]]);
        assert!(!event_g(&p, &d, 0.0, 1.0).unwrap());
        assert!(!event_g_bruteforce(&p, &d, 0.0, 1.0).unwrap());
    }

    #[test]
    fn witness_applies() {
        let d = e1();
        let p = p2(&[[0, 0], [-1, 0], [0, 0], [1, 0], [1, 1], [0, 1], [0, 2], [-1, 2], [0, 2], [1, 2], [2, 2]]);
        let w = g_witness(&p, &d, 0.0, 2.0).unwrap().unwrap();
        assert_eq!(w.intervals, vec![ErasureInterval::new(0, 2), ErasureInterval::new(6, 8)]);
        let y = w.apply(&p).unwrap();
        assert_eq!(first_hit(&y, &d, Cmp::Lt, 0.0), None);
        assert!(event_g_bruteforce(&p, &d, 0.0, 2.0).unwrap());
    }
}
