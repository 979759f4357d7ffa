use serde::{Deserialize, Serialize};

use super::{run_trials, EstimateResult};
use crate::error::{Error, Result};
use crate::graph::{divergence, graph_samplers, GraphEnvKey, GraphWalker, VertexId, WeightedDigraph};
use num_traits::Zero;

use crate::rational::{weight_to_f64, Weight};

/// Empirical versus exact probability that the first return to `x` comes
/// from `predecessor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopReversalRow {
    pub predecessor: VertexId,
    /// `w(y, x) / Σ_v w(v, x)`.
    #[serde(with = "crate::rational::as_string")]
    pub exact: Weight,
    pub exact_f64: f64,
    pub empirical: EstimateResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopReversalReport {
    pub vertex: VertexId,
    /// Every vertex has zero divergence. The identity is only claimed for
    /// such graphs; elsewhere the rows are still reported but `exact` need
    /// not match.
    pub divergence_free: bool,
    pub trials: u64,
    pub censored: u64,
    pub rows: Vec<LoopReversalRow>,
}

impl LoopReversalReport {
    pub fn row(&self, predecessor: VertexId) -> Option<&LoopReversalRow> {
        self.rows.iter().find(|r| r.predecessor == predecessor)
    }
}

/// One annealed excursion from `x` back to `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnTrial {
    pub trial: u64,
    pub steps: u64,
    /// `X_{T̃_x - 1}`, absent when censored.
    pub predecessor: Option<VertexId>,
    pub censored: bool,
}

/// Estimates the law of the vertex visited just before the first return to
/// `x`, each trial in a fresh Dirichlet environment on `g`.
pub fn verify_loop_reversal(
    g: &WeightedDigraph,
    x: VertexId,
    trials: u64,
    seed: u64,
    horizon: u64,
    workers: usize,
) -> Result<(LoopReversalReport, Vec<ReturnTrial>)> {
    g.label(x)?;
    let preds: Vec<(VertexId, Weight)> = g.in_edges(x).map(|e| (e.tail, e.weight)).collect();
    if preds.is_empty() {
        return Err(Error::InvalidVertex(x, "no in-edges".into()));
    }
    let total_in = g.in_weight(x);
    let divergence_free = g.vertices().all(|v| divergence(g, v).is_ok_and(|d| d.is_zero()));
    let samplers = graph_samplers(g)?;

    let records = run_trials(0..trials, workers, |trial| {
        let mut walker = GraphWalker::new(g, &samplers, GraphEnvKey { seed, trial });
        let (path, returned) = walker.walk_until(x, horizon, |_, v| v == x);
        ReturnTrial {
            trial,
            steps: path.len() as u64 - 1,
            predecessor: returned.then(|| path[path.len() - 2]),
            censored: !returned,
        }
    });

    let censored = records.iter().filter(|r| r.censored).count() as u64;
    let rows = preds
        .into_iter()
        .map(|(y, w)| {
            let hits = records.iter().filter(|r| r.predecessor == Some(y)).count() as u64;
            let exact = w / total_in;
            LoopReversalRow {
                predecessor: y,
                exact,
                exact_f64: weight_to_f64(&exact),
                empirical: EstimateResult::from_counts(hits, trials, censored),
            }
        })
        .collect();
    Ok((LoopReversalReport { vertex: x, divergence_free, trials, censored, rows }, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, VertexLabel};

    fn named(b: &mut GraphBuilder, n: &str) -> VertexId {
        b.add_vertex(VertexLabel::Named(n.into()))
    }

    #[test]
    fn two_vertex_graph() {
        let mut b = GraphBuilder::new();
        let (x, y) = (named(&mut b, "A"), named(&mut b, "B"));
        b.add_edge(x, y, Weight::from_integer(1)).unwrap();
        b.add_edge(y, x, Weight::from_integer(1)).unwrap();
        let g = b.build();
        let (rep, recs) = verify_loop_reversal(&g, x, 100, 1, 10, 1).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].exact, Weight::from_integer(1));
        assert_eq!(rep.rows[0].empirical.estimate, 1.0);
        assert!(recs.iter().all(|r| r.steps == 2));
    }

    #[test]
    fn three_cycle() {
        let mut b = GraphBuilder::new();
        let (a, bb, c) = (named(&mut b, "A"), named(&mut b, "B"), named(&mut b, "C"));
        for (t, h) in [(a, bb), (bb, c), (c, a)] {
            b.add_edge(t, h, Weight::from_integer(2)).unwrap();
        }
        let g = b.build();
        let (rep, _) = verify_loop_reversal(&g, a, 50, 3, 10, 2).unwrap();
        assert_eq!(rep.row(c).unwrap().exact, Weight::from_integer(1));
        assert_eq!(rep.row(c).unwrap().empirical.estimate, 1.0);
    }

    #[test]
    fn no_in_edges() {
        let mut b = GraphBuilder::new();
        let (a, bb) = (named(&mut b, "A"), named(&mut b, "B"));
        b.add_edge(a, bb, Weight::from_integer(1)).unwrap();
        b.add_edge(bb, bb, Weight::from_integer(1)).unwrap();
        let g = b.build();
        assert!(matches!(verify_loop_reversal(&g, a, 10, 0, 10, 1), Err(Error::InvalidVertex(..))));
    }

    #[test]
    fn asymmetric_divergence_free() {
        // cycle A->B->C->A of weight 1 plus A<->B of weight 2
        let mut b = GraphBuilder::new();
        let (a, bb, c) = (named(&mut b, "A"), named(&mut b, "B"), named(&mut b, "C"));
        let w = Weight::from_integer;
        b.add_edge(a, bb, w(3)).unwrap();
        b.add_edge(bb, a, w(2)).unwrap();
        b.add_edge(bb, c, w(1)).unwrap();
        b.add_edge(c, a, w(1)).unwrap();
        let g = b.build();
        let (rep, _) = verify_loop_reversal(&g, a, 40_000, 9, 10_000, 4).unwrap();
        assert!(rep.divergence_free);
        let rb = rep.row(bb).unwrap();
        assert_eq!(rb.exact, Weight::new(2, 3));
        assert!(rb.empirical.within_sigmas(2.0 / 3.0, 4.0), "{rb:?}");
        assert_eq!(rep.censored, 0);
    }

    #[test]
    fn nonzero_divergence_breaks_the_identity() {
        // A has predecessors B (weight 1) and C (weight 3), but B and C have
        // in-weight 3 and out-weight 2 and 4. An independent Polya-urn
        // simulation (1e5 runs) puts P(X_{T-1} = B) at 0.3529, not 1/4.
        let mut b = GraphBuilder::new();
        let (a, bb, c) = (named(&mut b, "A"), named(&mut b, "B"), named(&mut b, "C"));
        let w = Weight::from_integer;
        b.add_edge(a, bb, w(2)).unwrap();
        b.add_edge(a, c, w(2)).unwrap();
        b.add_edge(bb, a, w(1)).unwrap();
        b.add_edge(bb, c, w(1)).unwrap();
        b.add_edge(c, a, w(3)).unwrap();
        b.add_edge(c, bb, w(1)).unwrap();
        let g = b.build();
        let (rep, _) = verify_loop_reversal(&g, a, 40_000, 9, 10_000, 4).unwrap();
        assert!(!rep.divergence_free);
        let rb = rep.row(bb).unwrap();
        assert_eq!(rb.exact, Weight::new(1, 4));
        assert!((rb.empirical.estimate - 0.3529).abs() < 0.012, "{rb:?}");
    }
}
