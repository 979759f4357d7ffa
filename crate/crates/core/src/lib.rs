//! Random walks in Dirichlet environments on `Z^d`, their loop erasures,
//! and the finite weighted cylinder graphs used to study directional
//! transience.
//!
//! Environments are sampled lazily: the transition vector at a site is a
//! pure function of a master seed and the site coordinates, so any walk,
//! any number of walks, and any thread layout see the same environment.
//!
//! ```
//! use rwre_core::{Direction, DirichletLaw, EnvSeed, JumpLaw, Site, StopRule, Cmp, run_walk};
//!
//! let law = JumpLaw::from_pairs(&[([1, 0], 1), ([-1, 0], 1), ([0, 1], 1), ([0, -1], 1)]).unwrap();
//! let dlaw = DirichletLaw::new(law).unwrap();
//! let e1 = Direction::new(&[1.0, 0.0]).unwrap();
//! let rule = StopRule::horizon(10_000).with_half_space(e1, Cmp::Ge, 5.0);
//! let rec = run_walk(&dlaw, EnvSeed::new(7), 0, &Site::origin(2), &rule).unwrap();
//! assert_eq!(rec.path.sites()[0], Site::origin(2));
//! ```

pub mod cylinder;
pub mod environment;
pub mod erasure;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod lattice;
pub mod rational;
pub mod rng;
pub mod walk;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/environments.md")]
    mod environments {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/loop-erasure.md")]
    mod loop_erasure {}
    #[doc = include_str!("../../../book/src/cylinder.md")]
    mod cylinder {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

pub use cylinder::{build_cylinder, canonicalize, ClassSums, Cylinder, CylinderSpec};
pub use environment::{
    annealed_drift, annealed_drift_exact, site_distribution, DirichletLaw, DirichletSampler, EnvSeed, Environment,
    SiteDistribution,
};
pub use erasure::{
    erase_interval, event_b_horizon, event_g, event_g_bruteforce, g_witness, reachable_erasures, ErasureFamily,
    ErasureInterval,
};
pub use error::{Error, Result};
pub use graph::{
    divergence, graph_env_draw, to_dot, CanonicalSite, Edge, GraphBuilder, GraphEnvKey, GraphWalker, VertexId,
    VertexLabel, WeightedDigraph,
};
pub use lattice::{
    check_c3, first_hit, lateral_first_exit, prec_compare, C3Status, Cmp, Direction, Jump, JumpLaw, Site, WalkPath,
};
pub use rational::{format_weight, parse_weight, weight_to_f64, Weight};
pub use walk::{run_two_walks, run_walk, StopReason, StopRule, WalkRecord};
