//! Finite weighted digraphs with exact weights and Dirichlet environments
//! on them.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::{DirichletSampler, SiteDistribution};
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::rational::{format_weight, sum_weights, Weight};
use crate::rng::{stream, TAG_GRAPH_ENV, TAG_GRAPH_STEPS};

pub type VertexId = usize;

/// Cylinder cell: `along = x·u`, `around = x·u2 mod N|u2|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalSite {
    pub along: i64,
    pub around: i64,
}

impl fmt::Display for CanonicalSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.along, self.around)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexLabel {
    /// A site of a patch of the lattice graph.
    Interior(Site),
    /// A quotient class of the cylinder.
    Cell(CanonicalSite),
    /// Left boundary vertex `∂`.
    BoundaryDel,
    /// Right boundary vertex `M`.
    BoundaryM,
    Named(String),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Interior(s) => write!(f, "{s}"),
            VertexLabel::Cell(c) => write!(f, "{c}"),
            VertexLabel::BoundaryDel => f.write_str("DEL"),
            VertexLabel::BoundaryM => f.write_str("M"),
            VertexLabel::Named(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    #[serde(with = "crate::rational::as_string")]
    pub weight: Weight,
}

/// Directed graph without parallel edges. Built through [`GraphBuilder`],
/// which merges parallel edges by summing their weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    labels: Vec<VertexLabel>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl WeightedDigraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> Result<&VertexLabel> {
        self.labels.get(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn find(&self, label: &VertexLabel) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Out-edges of `v` in tail-head order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.out[v].iter().map(move |&i| &self.edges[i])
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.inc[v].iter().map(move |&i| &self.edges[i])
    }

    pub fn edge_weight(&self, tail: VertexId, head: VertexId) -> Option<Weight> {
        self.out.get(tail)?.iter().map(|&i| &self.edges[i]).find(|e| e.head == head).map(|e| e.weight)
    }

    pub fn out_weight(&self, v: VertexId) -> Weight {
        sum_weights(self.out_edges(v).map(|e| &e.weight))
    }

    pub fn in_weight(&self, v: VertexId) -> Weight {
        sum_weights(self.in_edges(v).map(|e| &e.weight))
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v < self.labels.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }
}

/// Accumulates edges, merging parallel ones.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<VertexLabel>,
    edges: BTreeMap<(VertexId, VertexId), Weight>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: VertexLabel) -> VertexId {
        self.labels.push(label);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, tail: VertexId, head: VertexId, weight: Weight) -> Result<()> {
        for v in [tail, head] {
            if v >= self.labels.len() {
                return Err(Error::UnknownVertex(v));
            }
        }
        if !weight.is_positive() {
            return Err(Error::InvalidGraph(format!("edge {tail}->{head} has non-positive weight {weight}")));
        }
        *self.edges.entry((tail, head)).or_insert_with(Weight::zero) += weight;
        Ok(())
    }

    pub fn build(self) -> WeightedDigraph {
        let n = self.labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let edges: Vec<Edge> = self
            .edges
            .into_iter()
            .enumerate()
            .map(|(i, ((tail, head), weight))| {
                out[tail].push(i);
                inc[head].push(i);
                Edge { tail, head, weight }
            })
            .collect();
        WeightedDigraph { labels: self.labels, edges, out, inc }
    }
}

/// In-weight minus out-weight at `v`.
pub fn divergence(g: &WeightedDigraph, v: VertexId) -> Result<Weight> {
    g.check(v)?;
    Ok(g.in_weight(v) - g.out_weight(v))
}

/// DOT rendering with exact `p/q` edge labels.
pub fn to_dot(g: &WeightedDigraph, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph {name} {{");
    for v in g.vertices() {
        let _ = writeln!(s, "  v{v} [label=\"{}\"];", g.labels[v]);
    }
    for e in g.edges() {
        let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.tail, e.head, format_weight(&e.weight));
    }
    s.push_str("}\n");
    s
}

/// Environment seed and trial of a graph environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEnvKey {
    pub seed: u64,
    pub trial: u64,
}

/// Dirichlet vector over the out-edges of `v`, deterministic per key.
pub fn graph_site_distribution(g: &WeightedDigraph, key: GraphEnvKey, v: VertexId) -> Result<SiteDistribution> {
    g.check(v)?;
    let weights: Vec<Weight> = g.out_edges(v).map(|e| e.weight).collect();
    if weights.is_empty() {
        return Err(Error::InvalidGraph(format!("vertex {v} ({}) has no out-edges", g.labels[v])));
    }
    let mut rng = stream(key.seed, TAG_GRAPH_ENV, [key.trial, v as u64]);
    Ok(DirichletSampler::new(&weights)?.sample(&mut rng))
}

/// Draws the full environment of one trial, one vector per vertex.
pub fn graph_env_draw(g: &WeightedDigraph, seed: u64, trial: u64) -> Result<Vec<SiteDistribution>> {
    let key = GraphEnvKey { seed, trial };
    g.vertices().map(|v| graph_site_distribution(g, key, v)).collect()
}

/// Lazily drawn graph environment with a step stream, for one trial.
pub struct GraphWalker<'g> {
    g: &'g WeightedDigraph,
    key: GraphEnvKey,
    samplers: &'g [DirichletSampler],
    env: Vec<Option<SiteDistribution>>,
    steps: rand_chacha::ChaCha8Rng,
}

/// Per-vertex samplers, reusable across trials.
pub fn graph_samplers(g: &WeightedDigraph) -> Result<Vec<DirichletSampler>> {
    g.vertices()
        .map(|v| {
            let weights: Vec<Weight> = g.out_edges(v).map(|e| e.weight).collect();
            if weights.is_empty() {
                return Err(Error::InvalidGraph(format!("vertex {v} ({}) has no out-edges", g.labels[v])));
            }
            DirichletSampler::new(&weights)
        })
        .collect()
}

impl<'g> GraphWalker<'g> {
    pub fn new(g: &'g WeightedDigraph, samplers: &'g [DirichletSampler], key: GraphEnvKey) -> Self {
        GraphWalker {
            g,
            key,
            samplers,
            env: vec![None; g.vertex_count()],
            steps: stream(key.seed, TAG_GRAPH_STEPS, [key.trial]),
        }
    }

    /// Environment vector at `v`; identical to [`graph_site_distribution`].
    pub fn at(&mut self, v: VertexId) -> &SiteDistribution {
        let key = self.key;
        let samplers = self.samplers;
        self.env[v].get_or_insert_with(|| {
            let mut rng = stream(key.seed, TAG_GRAPH_ENV, [key.trial, v as u64]);
            samplers[v].sample(&mut rng)
        })
    }

    pub fn step(&mut self, v: VertexId) -> VertexId {
        let u: f64 = self.steps.random();
        let k = self.at(v).sample_index(u);
        self.g.edges[self.g.out[v][k]].head
    }

    /// Walks from `start` until `stop(n, vertex)` holds for some `n >= 1` or
    /// `horizon` steps have been taken. Returns the path and whether it
    /// stopped before the horizon.
    pub fn walk_until(
        &mut self,
        start: VertexId,
        horizon: u64,
        mut stop: impl FnMut(u64, VertexId) -> bool,
    ) -> (Vec<VertexId>, bool) {
        let mut path = vec![start];
        let mut v = start;
        for n in 1..=horizon {
            v = self.step(v);
            path.push(v);
            if stop(n, v) {
                return (path, true);
            }
        }
        (path, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn w(x: i128) -> Weight {
        Weight::from_integer(x)
    }

    fn two(ab: i128, ba: i128) -> (WeightedDigraph, VertexId, VertexId) {
        let mut b = GraphBuilder::new();
        let x = b.add_vertex(VertexLabel::Named("A".into()));
        let y = b.add_vertex(VertexLabel::Named("B".into()));
        b.add_edge(x, y, w(ab)).unwrap();
        b.add_edge(y, x, w(ba)).unwrap();
        (b.build(), x, y)
    }

    #[test]
    fn divergence_examples() {
        let (g, a, b) = two(1, 1);
        assert_eq!(divergence(&g, a).unwrap(), Weight::zero());
        assert_eq!(divergence(&g, b).unwrap(), Weight::zero());
        let (g, a, b) = two(2, 1);
        assert_eq!(divergence(&g, a).unwrap(), w(-1));
        assert_eq!(divergence(&g, b).unwrap(), w(1));
        assert_eq!(divergence(&g, 9), Err(Error::UnknownVertex(9)));
    }

    #[test]
    fn parallel_edges_merge() {
        let mut b = GraphBuilder::new();
        let x = b.add_vertex(VertexLabel::Named("A".into()));
        let y = b.add_vertex(VertexLabel::Named("B".into()));
        b.add_edge(x, y, Ratio::new(1, 3)).unwrap();
        b.add_edge(x, y, Ratio::new(1, 6)).unwrap();
        assert!(b.add_edge(x, y, w(0)).is_err());
        let g = b.build();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edge_weight(x, y), Some(Ratio::new(1, 2)));
        assert!(to_dot(&g, "G").contains("v0 -> v1 [label=\"1/2\"]"));
    }

    #[test]
    fn single_out_edge_gets_probability_one() {
        let (g, a, _) = two(3, 1);
        let env = graph_env_draw(&g, 4, 0).unwrap();
        assert_eq!(env[a].probs, vec![1.0]);
    }

    #[test]
    fn sink_vertex_is_rejected() {
        let mut b = GraphBuilder::new();
        let x = b.add_vertex(VertexLabel::Named("A".into()));
        let y = b.add_vertex(VertexLabel::Named("B".into()));
        b.add_edge(x, y, w(1)).unwrap();
        let g = b.build();
        assert!(matches!(graph_env_draw(&g, 0, 0), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn symmetric_out_weights() {
        let mut b = GraphBuilder::new();
        let c = b.add_vertex(VertexLabel::Named("C".into()));
        let l = b.add_vertex(VertexLabel::Named("L".into()));
        let r = b.add_vertex(VertexLabel::Named("R".into()));
        b.add_edge(c, l, w(5)).unwrap();
        b.add_edge(c, r, w(5)).unwrap();
        b.add_edge(l, c, w(1)).unwrap();
        b.add_edge(r, c, w(1)).unwrap();
        let g = b.build();
        let n = 100_000;
        let mean = (0..n)
            .map(|t| graph_site_distribution(&g, GraphEnvKey { seed: 1, trial: t }, c).unwrap().probs[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "{mean}");
    }

    #[test]
    fn walker_matches_eager_draw() {
        let (g, a, b) = two(2, 3);
        let samplers = graph_samplers(&g).unwrap();
        let eager = graph_env_draw(&g, 8, 2).unwrap();
        let mut walker = GraphWalker::new(&g, &samplers, GraphEnvKey { seed: 8, trial: 2 });
        assert_eq!(walker.at(a), &eager[a]);
        assert_eq!(walker.at(b), &eager[b]);
        let (path, stopped) = walker.walk_until(a, 10, |_, v| v == a);
        assert!(stopped);
        assert_eq!(path, vec![a, b, a]);
    }
}
