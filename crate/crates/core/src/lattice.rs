//! Integer-lattice geometry: sites, directions, the lateral order used to
//! pick median exit points, half-space hitting times, and jump laws.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::Weight;

const UNIT_TOL: f64 = 1e-12;

/// A point of `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Site(pub SmallVec<[i64; 4]>);

impl Site {
    pub fn new(coords: &[i64]) -> Self {
        Site(SmallVec::from_slice(coords))
    }

    pub fn origin(d: usize) -> Self {
        Site(smallvec::smallvec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &Site) -> Site {
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Site) -> Site {
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Site {
        Site(self.0.iter().map(|a| -a).collect())
    }

    /// Exact integer dot product with another lattice vector.
    pub fn dot_int(&self, other: &Site) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.dot_int(self)
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(&a, b)| a as f64 * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl From<[i64; 2]> for Site {
    fn from(c: [i64; 2]) -> Self {
        Site::new(&c)
    }
}

impl From<[i64; 1]> for Site {
    fn from(c: [i64; 1]) -> Self {
        Site::new(&c)
    }
}

/// A unit direction `ℓ`, with its rotation `ℓ^⊥ = (-ℓ_2, ℓ_1)` in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    ell: SmallVec<[f64; 4]>,
    ell_perp: Option<[f64; 2]>,
}

impl Direction {
    /// Builds a direction from a vector that must already have unit length.
    pub fn new(ell: &[f64]) -> Result<Self> {
        if ell.is_empty() {
            return Err(Error::InvalidParameter("empty direction".into()));
        }
        let norm = ell.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!(
                "direction must have unit length, got norm {norm}"
            )));
        }
        let ell_perp = (ell.len() == 2).then(|| [-ell[1], ell[0]]);
        Ok(Direction { ell: SmallVec::from_slice(ell), ell_perp })
    }

    /// Normalizes `v` and builds the direction.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite vector".into()));
        }
        let unit: SmallVec<[f64; 4]> = v.iter().map(|x| x / norm).collect();
        Direction::new(&unit)
    }

    /// Direction of an integer vector.
    pub fn of_site(u: &Site) -> Result<Self> {
        let v: Vec<f64> = u.coords().iter().map(|&c| c as f64).collect();
        Direction::normalized(&v)
    }

    pub fn dim(&self) -> usize {
        self.ell.len()
    }

    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    pub fn ell_perp(&self) -> Option<[f64; 2]> {
        self.ell_perp
    }

    pub fn reversed(&self) -> Direction {
        let ell: SmallVec<[f64; 4]> = self.ell.iter().map(|x| -x).collect();
        let ell_perp = (ell.len() == 2).then(|| [-ell[1], ell[0]]);
        Direction { ell, ell_perp }
    }

    pub fn along(&self, x: &Site) -> f64 {
        x.dot(&self.ell)
    }

    pub fn lateral(&self, x: &Site) -> Result<f64> {
        match self.ell_perp {
            Some(p) if x.dim() == 2 => Ok(x.dot(&p)),
            _ => Err(Error::UnsupportedDimension(x.dim().max(self.dim()))),
        }
    }

    fn require_planar(&self) -> Result<[f64; 2]> {
        self.ell_perp.ok_or(Error::UnsupportedDimension(self.dim()))
    }
}

/// Comparison used by half-space hitting times `T_{⋄a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Cmp {
    pub fn holds(self, value: f64, a: f64) -> bool {
        match self {
            Cmp::Lt => value < a,
            Cmp::Le => value <= a,
            Cmp::Gt => value > a,
            Cmp::Ge => value >= a,
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        })
    }
}

/// Compares two planar sites by `ℓ^⊥` component, then by `ℓ` component.
///
/// Distinct sites whose floating-point keys tie (possible for irrational
/// directions) fall back to coordinate order so the result stays a strict
/// total order.
pub fn prec_compare(x: &Site, y: &Site, dir: &Direction) -> Result<Ordering> {
    let perp = dir.require_planar()?;
    for s in [x, y] {
        if s.dim() != 2 {
            return Err(Error::UnsupportedDimension(s.dim()));
        }
    }
    if x == y {
        return Ok(Ordering::Equal);
    }
    let key = |s: &Site| (s.dot(&perp), s.dot(dir.ell()));
    let (kx, ky) = (key(x), key(y));
    Ok(kx
        .0
        .total_cmp(&ky.0)
        .then(kx.1.total_cmp(&ky.1))
        .then_with(|| x.cmp(y)))
}

/// A finite trajectory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WalkPath(pub Vec<Site>);

impl WalkPath {
    pub fn new(sites: Vec<Site>) -> Self {
        WalkPath(sites)
    }

    pub fn sites(&self) -> &[Site] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&Site> {
        self.0.last()
    }

    /// Prefix `X_0, ..., X_end` (inclusive).
    pub fn prefix(&self, end: usize) -> WalkPath {
        WalkPath(self.0[..=end.min(self.0.len().saturating_sub(1))].to_vec())
    }

    /// Checks that every step belongs to the law's jump set.
    pub fn validate(&self, law: &JumpLaw) -> Result<()> {
        for w in self.0.windows(2) {
            let step = w[1].sub(&w[0]);
            if law.index_of(&step).is_none() {
                return Err(Error::InvalidParameter(format!(
                    "step {step} from {} is not in the jump set",
                    w[0]
                )));
            }
        }
        Ok(())
    }
}

impl From<Vec<Site>> for WalkPath {
    fn from(v: Vec<Site>) -> Self {
        WalkPath(v)
    }
}

/// `T_{⋄a}`: smallest index `n` with `(X_n·ℓ) ⋄ a`.
pub fn first_hit(path: &WalkPath, dir: &Direction, cmp: Cmp, a: f64) -> Option<usize> {
    path.0.iter().position(|x| cmp.holds(dir.along(x), a))
}

/// Lateral hitting time: smallest `n` with `|X_n·ℓ^⊥| >= a`.
pub fn lateral_first_exit(path: &WalkPath, dir: &Direction, a: f64) -> Result<Option<usize>> {
    let perp = dir.require_planar()?;
    let mut found = None;
    for (n, x) in path.0.iter().enumerate() {
        if x.dim() != 2 {
            return Err(Error::UnsupportedDimension(x.dim()));
        }
        if found.is_none() && x.dot(&perp).abs() >= a {
            found = Some(n);
        }
    }
    Ok(found)
}

/// One admissible jump with its Dirichlet weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Jump {
    pub step: Site,
    #[serde(with = "crate::rational::as_string")]
    pub alpha: Weight,
}

/// Jump set with positive weights. The jump radius is the largest
/// Euclidean step length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpLaw {
    dim: usize,
    jumps: Vec<Jump>,
    radius_sq: i64,
}

impl JumpLaw {
    pub fn new(jumps: Vec<(Site, Weight)>) -> Result<Self> {
        let dim = jumps
            .first()
            .map(|(s, _)| s.dim())
            .ok_or_else(|| Error::InvalidParameter("jump set is empty".into()))?;
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(jumps.len());
        for (step, alpha) in jumps {
            if step.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: step.dim() });
            }
            if step.is_zero() {
                return Err(Error::InvalidParameter("the zero jump is not allowed".into()));
            }
            if !alpha.is_positive() {
                return Err(Error::InvalidParameter(format!("weight of jump {step} must be positive")));
            }
            if !seen.insert(step.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate jump {step}")));
            }
            out.push(Jump { step, alpha });
        }
        let radius_sq = out.iter().map(|j| j.step.norm_sq()).max().unwrap_or(0);
        Ok(JumpLaw { dim, jumps: out, radius_sq })
    }

    /// Convenience constructor from integer coordinates and integer weights.
    pub fn from_pairs<const D: usize>(jumps: &[([i64; D], i128)]) -> Result<Self> {
        JumpLaw::new(
            jumps
                .iter()
                .map(|(c, a)| (Site::new(c), Weight::from_integer(*a)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// `R`, the Euclidean jump radius.
    pub fn radius(&self) -> f64 {
        (self.radius_sq as f64).sqrt()
    }

    /// `R^2`, exact.
    pub fn radius_sq(&self) -> i64 {
        self.radius_sq
    }

    pub fn total_weight(&self) -> Weight {
        self.jumps.iter().fold(Weight::zero(), |acc, j| acc + j.alpha)
    }

    pub fn index_of(&self, step: &Site) -> Option<usize> {
        self.jumps.iter().position(|j| &j.step == step)
    }

    /// Same jumps with new weights, in jump order.
    pub fn with_weights(&self, weights: &[Weight]) -> Result<Self> {
        if weights.len() != self.jumps.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} weights, got {}",
                self.jumps.len(),
                weights.len()
            )));
        }
        JumpLaw::new(
            self.jumps
                .iter()
                .zip(weights)
                .map(|(j, w)| (j.step.clone(), *w))
                .collect(),
        )
    }
}

/// Outcome of the bounded reachability check for condition (C3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C3Status {
    Proven,
    Unknown,
}

/// Semidecision for "every site is reachable from 0 using jumps".
///
/// Runs a breadth-first search from the origin restricted to the box
/// `[-box_radius, box_radius]^d`. Returns [`C3Status::Proven`] when every
/// site within sup-distance `⌈R⌉` and every unit vector `±e_i` is reached.
/// Reaching all `±e_i` generates `Z^d` as a semigroup.
pub fn check_c3(law: &JumpLaw, box_radius: u32) -> C3Status {
    let d = law.dim();
    let r_ceil = law.radius().ceil() as i64;
    let bound = (box_radius as i64).max(r_ceil);
    let in_box = |s: &Site, b: i64| s.coords().iter().all(|c| c.abs() <= b);

    let origin = Site::origin(d);
    let mut seen: HashSet<Site> = HashSet::from([origin.clone()]);
    let mut queue = VecDeque::from([origin]);
    while let Some(x) = queue.pop_front() {
        for j in law.jumps() {
            let y = x.add(&j.step);
            if in_box(&y, bound) && seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }

    let units_reached = (0..d).all(|i| {
        [1, -1].iter().all(|&s| {
            let mut c = smallvec::smallvec![0; d];
            c[i] = s;
            seen.contains(&Site(c))
        })
    });
    let inner_count = seen.iter().filter(|s| in_box(s, r_ceil)).count();
    let inner_total = (2 * r_ceil + 1).pow(d as u32) as usize;
    if units_reached && inner_count == inner_total {
        C3Status::Proven
    } else {
        C3Status::Unknown
    }
}
