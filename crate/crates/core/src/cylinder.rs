//! The cylinder graph `H_{N,L}`.
//!
//! Take the slab `0 <= x·v̂ <= L` of the lattice graph, where `v̂ = u/|u|`,
//! and identify sites that differ by multiples of `N·u2`. Jumps that leave
//! the slab below are rewired to a boundary vertex `∂`, jumps that leave it
//! above to a boundary vertex `M`, and jumps entering the slab from outside
//! start at `∂` or `M` respectively. Two special edges `M -> ∂` and `∂ -> M`
//! carry weight `W`, the total weight of the edges into `∂` from the slab.
//!
//! Every slab vertex has zero divergence by construction. When the annealed
//! drift is orthogonal to `u`, the four boundary classes have equal total
//! weight and `∂` and `M` have zero divergence too.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CanonicalSite, GraphBuilder, VertexId, VertexLabel, WeightedDigraph};
use crate::lattice::{check_c3, C3Status, JumpLaw, Site};
use crate::rational::{sum_weights, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub law: JumpLaw,
    /// Integer vector along the slab normal.
    pub u: Site,
    /// Integer vector orthogonal to `u`; the period is `N·u2`.
    pub u2: Site,
    /// Circumference multiplier `N`.
    pub n: u32,
    /// Slab depth `L` measured along the unit normal.
    pub depth: f64,
    /// Lower bound `K` on the circumference `N|u2|`.
    #[serde(default)]
    pub min_circumference: f64,
}

impl CylinderSpec {
    pub fn new(law: JumpLaw, u: Site, u2: Site, n: u32, depth: f64) -> Self {
        CylinderSpec { law, u, u2, n, depth, min_circumference: 0.0 }
    }

    /// `N|u2|^2`, the period of the `around` coordinate.
    pub fn period(&self) -> i64 {
        self.n as i64 * self.u2.norm_sq()
    }

    /// Largest `x·u` inside the slab.
    pub fn max_along(&self) -> i64 {
        let u_norm = (self.u.norm_sq() as f64).sqrt();
        (self.depth * u_norm + 1e-9).floor() as i64
    }

    /// Circumference `N|u2|`.
    pub fn circumference(&self) -> f64 {
        self.n as f64 * (self.u2.norm_sq() as f64).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Construction(m));
        if self.law.dim() != 2 {
            return Err(Error::UnsupportedDimension(self.law.dim()));
        }
        if self.u.dim() != 2 || self.u2.dim() != 2 {
            return bad("u and u2 must be planar integer vectors".into());
        }
        if self.u.is_zero() || self.u2.is_zero() {
            return bad("u and u2 must be nonzero".into());
        }
        if self.u.dot_int(&self.u2) != 0 {
            return bad(format!("u = {} and u2 = {} are not orthogonal", self.u, self.u2));
        }
        if self.n == 0 {
            return bad("N must be positive".into());
        }
        // circumference must exceed 2R: (N|u2|)^2 > 4R^2, exact in integers
        let circ_sq = (self.n as i64).pow(2) * self.u2.norm_sq();
        if circ_sq <= 4 * self.law.radius_sq() {
            return bad(format!(
                "circumference {:.3} must exceed twice the jump radius {:.3}",
                self.circumference(),
                self.law.radius()
            ));
        }
        if self.circumference() < self.min_circumference {
            return bad(format!(
                "circumference {:.3} is below the configured minimum {}",
                self.circumference(),
                self.min_circumference
            ));
        }
        if !(self.depth >= 0.0) || !self.depth.is_finite() {
            return bad(format!("slab depth must be a non-negative real, got {}", self.depth));
        }
        let box_radius = 3 * (self.law.radius().ceil() as u32).max(2);
        if check_c3(&self.law, box_radius) != C3Status::Proven {
            return bad("jump set does not provably generate Z^2".into());
        }
        Ok(())
    }
}

/// Quotient class of `x`.
pub fn canonicalize(spec: &CylinderSpec, x: &Site) -> CanonicalSite {
    CanonicalSite { along: x.dot_int(&spec.u), around: x.dot_int(&spec.u2).rem_euclid(spec.period()) }
}

/// Total weights of the four boundary edge classes and of each special edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSums {
    /// Slab to `∂`.
    #[serde(with = "crate::rational::as_string")]
    pub to_del: Weight,
    /// `∂` to slab.
    #[serde(with = "crate::rational::as_string")]
    pub from_del: Weight,
    /// Slab to `M`.
    #[serde(with = "crate::rational::as_string")]
    pub to_m: Weight,
    /// `M` to slab.
    #[serde(with = "crate::rational::as_string")]
    pub from_m: Weight,
    /// `W`.
    #[serde(with = "crate::rational::as_string")]
    pub special: Weight,
}

impl ClassSums {
    pub fn all_equal(&self) -> bool {
        let w = &self.special;
        [&self.to_del, &self.from_del, &self.to_m, &self.from_m].iter().all(|s| *s == w)
    }

    /// `Σ(slab -> M) - Σ(slab -> ∂)`, proportional to `Δ·u`.
    pub fn drift_gap(&self) -> Weight {
        self.to_m - self.to_del
    }
}

/// A built cylinder graph and the handles needed to walk on it.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub spec: CylinderSpec,
    graph: WeightedDigraph,
    del: VertexId,
    m: VertexId,
    cells: HashMap<CanonicalSite, VertexId>,
}

impl Cylinder {
    pub fn graph(&self) -> &WeightedDigraph {
        &self.graph
    }

    pub fn del(&self) -> VertexId {
        self.del
    }

    pub fn m(&self) -> VertexId {
        self.m
    }

    pub fn cell(&self, c: &CanonicalSite) -> Option<VertexId> {
        self.cells.get(c).copied()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn class_sums(&self) -> ClassSums {
        let g = &self.graph;
        let is_slab = |v: VertexId| v != self.del && v != self.m;
        let sum = |f: &dyn Fn(VertexId, VertexId) -> bool| {
            sum_weights(g.edges().iter().filter(|e| f(e.tail, e.head)).map(|e| &e.weight))
        };
        ClassSums {
            to_del: sum(&|t, h| is_slab(t) && h == self.del),
            from_del: sum(&|t, h| t == self.del && is_slab(h)),
            to_m: sum(&|t, h| is_slab(t) && h == self.m),
            from_m: sum(&|t, h| t == self.m && is_slab(h)),
            special: g.edge_weight(self.m, self.del).unwrap_or_else(Weight::zero),
        }
    }
}

/// One representative per quotient class of the slab.
fn slab_representatives(spec: &CylinderSpec) -> Vec<Site> {
    let (u, u2) = (&spec.u, &spec.u2);
    let (a_max, period) = (spec.max_along(), spec.period());
    let (un, u2n) = (u.norm_sq() as f64, u2.norm_sq() as f64);
    let corner = |a: f64, c: f64| -> [f64; 2] {
        let uc = u.coords();
        let vc = u2.coords();
        [a * uc[0] as f64 / un + c * vc[0] as f64 / u2n, a * uc[1] as f64 / un + c * vc[1] as f64 / u2n]
    };
    let corners = [
        corner(0.0, 0.0),
        corner(a_max as f64, 0.0),
        corner(0.0, period as f64),
        corner(a_max as f64, period as f64),
    ];
    let lo = |k: usize| corners.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min).floor() as i64 - 1;
    let hi = |k: usize| corners.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;

    let mut reps = Vec::new();
    for x0 in lo(0)..=hi(0) {
        for x1 in lo(1)..=hi(1) {
            let x = Site::from([x0, x1]);
            let along = x.dot_int(u);
            let around = x.dot_int(u2);
            if (0..=a_max).contains(&along) && (0..period).contains(&around) {
                reps.push(x);
            }
        }
    }
    reps.sort_by_key(|x| (x.dot_int(u), x.dot_int(u2)));
    reps
}

/// Builds `H_{N,L}`.
pub fn build_cylinder(spec: &CylinderSpec) -> Result<Cylinder> {
    spec.validate()?;
    let a_max = spec.max_along();
    let reps = slab_representatives(spec);

    let mut b = GraphBuilder::new();
    let mut cells = HashMap::with_capacity(reps.len());
    for x in &reps {
        let c = canonicalize(spec, x);
        let v = b.add_vertex(VertexLabel::Cell(c));
        if cells.insert(c, v).is_some() {
            return Err(Error::Construction(format!("duplicate representative for class {c}")));
        }
    }
    let del = b.add_vertex(VertexLabel::BoundaryDel);
    let m = b.add_vertex(VertexLabel::BoundaryM);

    let mut to_del = Weight::zero();
    // vertex ids of the cells follow the order of `reps`
    for (v, x) in reps.iter().enumerate() {
        for j in spec.law.jumps() {
            let fwd = x.add(&j.step);
            let along = fwd.dot_int(&spec.u);
            let head = if along < 0 {
                to_del += j.alpha;
                del
            } else if along > a_max {
                m
            } else {
                cells[&canonicalize(spec, &fwd)]
            };
            b.add_edge(v, head, j.alpha)?;

            let back = x.sub(&j.step).dot_int(&spec.u);
            if back < 0 {
                b.add_edge(del, v, j.alpha)?;
            } else if back > a_max {
                b.add_edge(m, v, j.alpha)?;
            }
        }
    }
    if to_del.is_zero() {
        return Err(Error::Construction("no edges leave the slab below; W would be zero".into()));
    }
    b.add_edge(m, del, to_del)?;
    b.add_edge(del, m, to_del)?;

    Ok(Cylinder { spec: spec.clone(), graph: b.build(), del, m, cells })
}
