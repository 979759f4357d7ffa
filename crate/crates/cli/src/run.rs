//! Experiment dispatch.

use num_traits::{Signed, Zero};
use rwre_core::experiments::{
    decomposition_report, estimate_transience, inequality_804_report, verify_loop_reversal, DecompositionConfig,
};
use rwre_core::{
    annealed_drift_exact, build_cylinder, check_c3, divergence, format_weight, to_dot, weight_to_f64, C3Status,
    CanonicalSite, Cylinder, CylinderSpec, DirichletLaw, Site, VertexId, Weight,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::{CylinderSection, Experiment, ExperimentConfig};
use crate::logfmt::{list, Record};
use crate::CliError;

/// Everything a run produces before it is written anywhere.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub summary: Record,
    pub trials: Vec<Value>,
    pub dot: Option<String>,
    /// Set when a checked property fails; the outputs are still complete.
    pub property_failure: Option<String>,
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn rows<T: Serialize>(xs: &[T]) -> Vec<Value> {
    xs.iter().map(|x| serde_json::to_value(x).expect("trial records serialize")).collect()
}

fn cylinder(cfg: &ExperimentConfig) -> Result<Cylinder, CliError> {
    let c: &CylinderSection = cfg.cylinder.as_ref().expect("validated");
    let spec = CylinderSpec::new(cfg.law.clone(), Site::new(&c.u), Site::new(&c.u2), c.n, c.l);
    build_cylinder(&spec).map_err(|e| invalid(format!("[cylinder]: {e}")))
}

fn vertex(cyl: &Cylinder, name: &str) -> Result<VertexId, CliError> {
    match name.trim() {
        "DEL" => Ok(cyl.del()),
        "M" => Ok(cyl.m()),
        s => {
            let parse = || -> Option<CanonicalSite> {
                let (a, b) = s.trim_matches(|c| c == '(' || c == ')').split_once(',')?;
                Some(CanonicalSite { along: a.trim().parse().ok()?, around: b.trim().parse().ok()? })
            };
            parse()
                .and_then(|c| cyl.cell(&c))
                .ok_or_else(|| invalid(format!("[cylinder]: no vertex {s:?} (use DEL, M or \"along,around\")")))
        }
    }
}

pub fn run(cfg: &ExperimentConfig, seed: u64, emit_dot: bool) -> Result<RunOutput, CliError> {
    let cylinder_experiment =
        matches!(cfg.experiment, Experiment::CylinderAudit | Experiment::LoopReversal | Experiment::Ineq804);
    if emit_dot && !cylinder_experiment {
        return Err(invalid(format!("--emit-dot needs a cylinder experiment, not {}", cfg.experiment)));
    }
    let mut out = RunOutput::default();
    let dlaw = DirichletLaw::new(cfg.law.clone()).map_err(invalid)?;
    let s = &mut out.summary;
    match cfg.experiment {
        Experiment::Drift => {
            let drift = annealed_drift_exact(&dlaw);
            s.push("drift", list(&drift, format_weight));
            s.push("drift_f64", list(&drift, |w| weight_to_f64(w).to_string()));
        }
        Experiment::C3Check => {
            let r = cfg.law.radius();
            let radius = cfg.box_radius.unwrap_or(3 * (r.ceil() as u32).max(2));
            if (radius as f64) < r {
                return Err(invalid(format!("box_radius {radius} is below the jump radius {r}")));
            }
            let status = check_c3(&cfg.law, radius);
            s.push("box_radius", radius);
            s.push("status", if status == C3Status::Proven { "proven" } else { "unknown" });
        }
        Experiment::CylinderAudit => {
            let cyl = cylinder(cfg)?;
            let g = cyl.graph();
            let divs: Vec<Weight> = g.vertices().map(|v| divergence(g, v).expect("vertex exists")).collect();
            let div_max = divs.iter().map(|d| d.abs()).max().unwrap_or_else(Weight::zero);
            let sums = cyl.class_sums();
            let c = cfg.cylinder.as_ref().expect("validated");
            let drift = annealed_drift_exact(&dlaw);
            let drift_u = drift[0] * Weight::from_integer(c.u[0] as i128) + drift[1] * Weight::from_integer(c.u[1] as i128);
            s.push("vertices", g.vertex_count());
            s.push("edges", g.edges().len());
            s.push("divergence_max", format_weight(&div_max));
            s.push("class_2a", format_weight(&sums.to_del));
            s.push("class_2b", format_weight(&sums.from_del));
            s.push("class_2c", format_weight(&sums.to_m));
            s.push("class_2d", format_weight(&sums.from_m));
            s.push("special_weight", format_weight(&sums.special));
            s.push("class_sums_equal", sums.all_equal());
            s.push("drift_gap", format_weight(&sums.drift_gap()));
            s.push("drift_dot_u", format_weight(&drift_u));
            let ok = if drift_u.is_zero() {
                div_max.is_zero() && sums.all_equal()
            } else {
                !sums.drift_gap().is_zero() && sums.drift_gap().is_positive() == drift_u.is_positive()
            };
            if !ok {
                out.property_failure = Some(if drift_u.is_zero() {
                    "zero-drift cylinder has nonzero divergence or unequal class sums".into()
                } else {
                    "class-sum gap does not track the sign of the drift".into()
                });
            }
            out.trials = g
                .vertices()
                .map(|v| {
                    serde_json::json!({
                        "vertex": v,
                        "label": g.labels()[v].to_string(),
                        "divergence": format_weight(&divs[v]),
                    })
                })
                .collect();
            if emit_dot {
                out.dot = Some(to_dot(g, "cylinder"));
            }
        }
        Experiment::LoopReversal => {
            let cyl = cylinder(cfg)?;
            let c = cfg.cylinder.as_ref().expect("validated");
            let x = vertex(&cyl, c.vertex.as_deref().unwrap_or("DEL"))?;
            let (rep, recs) =
                verify_loop_reversal(cyl.graph(), x, cfg.trials, seed, cfg.horizon, cfg.workers).map_err(invalid)?;
            let y = match c.predecessor.as_deref() {
                Some(p) => vertex(&cyl, p)?,
                None if x == cyl.del() => cyl.m(),
                None => rep.rows[0].predecessor,
            };
            let row = rep
                .row(y)
                .ok_or_else(|| invalid(format!("[cylinder]: {} is not a predecessor of {}", cyl.graph().labels()[y], cyl.graph().labels()[x])))?;
            let labels = cyl.graph().labels();
            let within = row.empirical.within_sigmas(row.exact_f64, 4.0);
            s.push("vertex", &labels[x]);
            s.push("predecessor", &labels[y]);
            s.push("exact", row.exact_f64);
            s.push("exact_ratio", format_weight(&row.exact));
            s.push("empirical", row.empirical.estimate);
            s.push("std_error", row.empirical.std_error);
            s.push("within_4se", within);
            s.push("divergence_free", rep.divergence_free);
            s.push("trials", rep.trials);
            s.push("censored", rep.censored);
            if !within {
                out.property_failure = Some(format!(
                    "empirical {} is more than 4 standard errors from {}",
                    row.empirical.estimate, row.exact_f64
                ));
            }
            out.trials = rows(&recs);
            if emit_dot {
                out.dot = Some(to_dot(cyl.graph(), "cylinder"));
            }
        }
        Experiment::Ineq804 => {
            let cyl = cylinder(cfg)?;
            let (rep, recs) = inequality_804_report(&cyl, cfg.trials, seed, cfg.horizon, cfg.workers).map_err(invalid)?;
            s.push("lhs", rep.lhs);
            s.push("first_return_special", rep.first_return_special.estimate);
            s.push("detour_term", rep.detour_term.estimate);
            s.push("boundary_return_special", rep.boundary_return_special.estimate);
            s.push("combined_std_error", rep.combined_std_error);
            s.push("slack", rep.slack);
            s.push("satisfied", rep.satisfied);
            s.push(
                "censored",
                rep.first_return_special.censored + rep.detour_term.censored + rep.boundary_return_special.censored,
            );
            if !rep.satisfied {
                out.property_failure = Some(format!("inequality fails beyond 4 standard errors (slack {})", rep.slack));
            }
            out.trials = rows(&recs);
            if emit_dot {
                out.dot = Some(to_dot(cyl.graph(), "cylinder"));
            }
        }
        Experiment::Transience => {
            let dir = cfg.direction.as_ref().expect("validated");
            let b = cfg.b.expect("validated");
            let (est, recs) =
                estimate_transience(&dlaw, dir, b, cfg.horizon, cfg.trials, seed, cfg.workers).map_err(invalid)?;
            let drift = rwre_core::annealed_drift(&dlaw);
            let along: f64 = drift.iter().zip(dir.ell()).map(|(a, b)| a * b).sum();
            s.push("direction", list(dir.ell(), |x| x.to_string()));
            s.push("drift_dot_direction", along);
            s.push("b", b);
            s.push("horizon", cfg.horizon);
            s.push("estimate", est.estimate);
            s.push("std_error", est.std_error);
            s.push("trials", est.trials);
            s.push("censored", est.censored);
            out.trials = rows(&recs);
        }
        Experiment::TwoWalk => {
            let dir = cfg.direction.as_ref().expect("validated");
            let dc = DecompositionConfig {
                horizon: cfg.horizon,
                workers: cfg.workers,
                pilot_samples: cfg.pilot_samples,
                ..DecompositionConfig::new(cfg.l.expect("validated"), cfg.trials, seed)
            };
            let (rep, recs) = decomposition_report(&dlaw, dir, &dc).map_err(invalid)?;
            let c = rep.counts;
            s.push("L", dc.l);
            s.push("z_L", &rep.z_l);
            s.push("trials", c.trials);
            s.push("censored", c.censored);
            s.push("g_both", c.g_both);
            s.push("opposite", c.opposite);
            s.push("intersect", c.intersect);
            s.push("proximity", c.proximity);
            s.push("violations", c.violations);
            s.push("intersect_without_proximity", c.intersect_without_proximity);
            if c.violations > 0 || c.intersect_without_proximity > 0 || c.class_without_g > 0 {
                out.property_failure = Some(format!(
                    "{} decomposition violations, {} intersections without proximity",
                    c.violations, c.intersect_without_proximity
                ));
            }
            out.trials = rows(&recs);
        }
    }
    Ok(out)
}
