//! TOML experiment configuration.
//!
//! ```toml
//! experiment = "loop-reversal"
//! trials = 100000
//! horizon = 1000000
//!
//! [law]
//! jumps = [[0, 1], [1, -1], [-2, 0]]
//! weights = ["2", "2", "1"]
//!
//! [cylinder]
//! u = [2, 1]
//! u2 = [-1, 2]
//! N = 4
//! L = 10.0
//! ```

use std::fmt;
use std::path::Path;

use rwre_core::{format_weight, parse_weight, Direction, JumpLaw, Site, Weight};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Drift,
    Transience,
    LoopReversal,
    TwoWalk,
    CylinderAudit,
    #[serde(rename = "ineq-804")]
    Ineq804,
    C3Check,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::Drift => "drift",
            Experiment::Transience => "transience",
            Experiment::LoopReversal => "loop-reversal",
            Experiment::TwoWalk => "two-walk",
            Experiment::CylinderAudit => "cylinder-audit",
            Experiment::Ineq804 => "ineq-804",
            Experiment::C3Check => "c3-check",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawWeight {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLaw {
    jumps: Vec<Vec<i64>>,
    weights: Vec<RawWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderSection {
    pub u: Vec<i64>,
    pub u2: Vec<i64>,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub l: f64,
    /// `"DEL"`, `"M"` or `"along,around"`; loop-reversal only.
    #[serde(default)]
    pub vertex: Option<String>,
    /// Predecessor reported in the summary; loop-reversal only.
    #[serde(default)]
    pub predecessor: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    seed: Option<u64>,
    trials: Option<u64>,
    workers: Option<usize>,
    horizon: Option<u64>,
    direction: Option<Vec<f64>>,
    #[serde(rename = "L")]
    l: Option<f64>,
    b: Option<f64>,
    box_radius: Option<u32>,
    pilot_samples: Option<usize>,
    law: RawLaw,
    cylinder: Option<CylinderSection>,
}

/// A validated configuration. `seed` and `workers` are not part of the
/// digest: the first is reported on its own and the second never changes
/// results.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub law: JumpLaw,
    pub seed: Option<u64>,
    pub trials: u64,
    pub workers: usize,
    pub horizon: u64,
    pub direction: Option<Direction>,
    pub l: Option<f64>,
    pub b: Option<f64>,
    pub box_radius: Option<u32>,
    pub pilot_samples: usize,
    pub cylinder: Option<CylinderSection>,
}

#[derive(Serialize)]
struct Canonical<'a> {
    experiment: Experiment,
    jumps: Vec<Vec<i64>>,
    weights: Vec<String>,
    trials: u64,
    horizon: u64,
    direction: Option<&'a [f64]>,
    l: Option<f64>,
    b: Option<f64>,
    box_radius: Option<u32>,
    pilot_samples: usize,
    cylinder: Option<&'a CylinderSection>,
}

impl ExperimentConfig {
    /// Hex SHA-256 of the canonical JSON form of every result-affecting field.
    pub fn digest(&self) -> String {
        let canonical = Canonical {
            experiment: self.experiment,
            jumps: self.law.jumps().iter().map(|j| j.step.coords().to_vec()).collect(),
            weights: self.law.jumps().iter().map(|j| format_weight(&j.alpha)).collect(),
            trials: self.trials,
            horizon: self.horizon,
            direction: self.direction.as_ref().map(|d| d.ell()),
            l: self.l,
            b: self.b,
            box_radius: self.box_radius,
            pilot_samples: self.pilot_samples,
            cylinder: self.cylinder.as_ref(),
        };
        let json = serde_json::to_vec(&canonical).expect("canonical config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// 1-based line of the first `key = ...` inside `[section]` (or at top
/// level), falling back to the section header and then to line 1.
fn line_of(src: &str, section: Option<&str>, key: &str) -> usize {
    let mut current: Option<&str> = None;
    let mut header = None;
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(name.trim());
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        let k = t.split('=').next().unwrap_or("").trim().trim_matches('"');
        if current == section && t.contains('=') && k == key {
            return i + 1;
        }
    }
    header.unwrap_or(1)
}

struct Ctx<'a> {
    path: &'a str,
    src: &'a str,
}

impl Ctx<'_> {
    fn err(&self, section: Option<&str>, key: &str, msg: impl fmt::Display) -> CliError {
        CliError::Validation(format!("{}:{}: {msg}", self.path, line_of(self.src, section, key)))
    }
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}:1: cannot read config: {e}", path.display())))?;
    parse(&src, &path.display().to_string())
}

/// Parses and validates `src`; `name` prefixes error messages.
pub fn parse(src: &str, name: &str) -> Result<ExperimentConfig, CliError> {
    let cx = Ctx { path: name, src };
    let raw: RawConfig = toml::from_str(src).map_err(|e| {
        let line = e.span().map_or(1, |s| src[..s.start.min(src.len())].matches('\n').count() + 1);
        CliError::Validation(format!("{name}:{line}: {}", e.message()))
    })?;

    let law = parse_law(&cx, &raw.law)?;
    let d = law.dim();
    let positive = |key: &str, v: Option<f64>| -> Result<Option<f64>, CliError> {
        match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(cx.err(None, key, format!("{key} must be positive, got {x}"))),
            v => Ok(v),
        }
    };
    let l = positive("L", raw.l)?;
    let b = positive("b", raw.b)?;
    let trials = raw.trials.unwrap_or(1000);
    let horizon = raw.horizon.unwrap_or(10_000);
    let workers = raw.workers.unwrap_or(1);
    for (key, v) in [("trials", trials), ("horizon", horizon), ("workers", workers as u64)] {
        if v == 0 {
            return Err(cx.err(None, key, format!("{key} must be at least 1")));
        }
    }
    let direction = match &raw.direction {
        None => None,
        Some(v) if v.len() != d => {
            return Err(cx.err(None, "direction", format!("direction has {} entries, the law has dimension {d}", v.len())))
        }
        Some(v) => Some(Direction::normalized(v).map_err(|e| cx.err(None, "direction", e))?),
    };
    if let Some(c) = &raw.cylinder {
        let s = Some("cylinder");
        for (key, v) in [("u", &c.u), ("u2", &c.u2)] {
            if v.len() != 2 {
                return Err(cx.err(s, key, format!("{key} must have 2 entries")));
            }
        }
        if c.n == 0 {
            return Err(cx.err(s, "N", "N must be at least 1"));
        }
        if !(c.l >= 0.0 && c.l.is_finite()) {
            return Err(cx.err(s, "L", format!("L must be non-negative, got {}", c.l)));
        }
    }

    let need = |ok: bool, section: Option<&str>, key: &str| -> Result<(), CliError> {
        if ok {
            Ok(())
        } else {
            let what = section.map_or(key.to_string(), |s| format!("[{s}]"));
            Err(cx.err(None, "experiment", format!("experiment {} needs {what}", raw.experiment)))
        }
    };
    match raw.experiment {
        Experiment::Transience => {
            need(direction.is_some(), None, "direction")?;
            need(b.is_some(), None, "b")?;
        }
        Experiment::TwoWalk => {
            need(direction.is_some(), None, "direction")?;
            need(l.is_some(), None, "L")?;
            if d != 2 {
                return Err(cx.err(Some("law"), "jumps", "two-walk needs a two-dimensional law"));
            }
        }
        Experiment::LoopReversal | Experiment::CylinderAudit | Experiment::Ineq804 => {
            need(raw.cylinder.is_some(), Some("cylinder"), "")?;
            if d != 2 {
                return Err(cx.err(Some("law"), "jumps", "cylinders need a two-dimensional law"));
            }
        }
        Experiment::Drift | Experiment::C3Check => {}
    }

    Ok(ExperimentConfig {
        experiment: raw.experiment,
        law,
        seed: raw.seed,
        trials,
        workers,
        horizon,
        direction,
        l,
        b,
        box_radius: raw.box_radius,
        pilot_samples: raw.pilot_samples.unwrap_or(1000),
        cylinder: raw.cylinder,
    })
}

fn parse_law(cx: &Ctx<'_>, raw: &RawLaw) -> Result<JumpLaw, CliError> {
    let s = Some("law");
    if raw.jumps.len() != raw.weights.len() {
        return Err(cx.err(
            s,
            "weights",
            format!("{} jumps but {} weights", raw.jumps.len(), raw.weights.len()),
        ));
    }
    let weights = raw
        .weights
        .iter()
        .map(|w| match w {
            RawWeight::Int(i) => Ok(Weight::from_integer(*i as i128)),
            RawWeight::Text(t) => parse_weight(t),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| cx.err(s, "weights", e))?;
    let jumps = raw.jumps.iter().map(|j| Site::new(j)).zip(weights).collect();
    JumpLaw::new(jumps).map_err(|e| cx.err(s, "jumps", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = "experiment = \"drift\"\n\n[law]\njumps = [[0, 1], [1, -1], [-2, 0]]\nweights = [\"2\", \"2/1\", 1]\n";

    #[test]
    fn parses_mixed_weights() {
        let c = parse(FIG3, "c.toml").unwrap();
        assert_eq!(c.experiment, Experiment::Drift);
        assert_eq!(c.law.jumps()[1].alpha, Weight::from_integer(2));
        assert_eq!(c.trials, 1000);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = FIG3.replace("\"2/1\"", "\"2/0\"");
        let CliError::Validation(msg) = parse(&bad, "c.toml").unwrap_err() else { panic!() };
        assert!(msg.starts_with("c.toml:5: "), "{msg}");

        let bad = format!("trials = 0\n{FIG3}");
        let CliError::Validation(msg) = parse(&bad, "c.toml").unwrap_err() else { panic!() };
        assert!(msg.starts_with("c.toml:1: trials"), "{msg}");

        let bad = FIG3.replace("drift", "nope");
        let CliError::Validation(msg) = parse(&bad, "c.toml").unwrap_err() else { panic!() };
        assert!(msg.starts_with("c.toml:1: "), "{msg}");
    }

    #[test]
    fn missing_requirements() {
        let t = FIG3.replace("drift", "transience");
        assert!(parse(&t, "c").is_err());
        let t = format!("direction = [-1.0, 0.0]\nb = 5.0\n{t}");
        assert!(parse(&t, "c").is_ok());
    }

    #[test]
    fn digest_ignores_seed_and_workers() {
        let a = parse(FIG3, "c").unwrap();
        let b = parse(&format!("seed = 3\nworkers = 4\n{FIG3}"), "c").unwrap();
        let c = parse(&format!("trials = 5\n{FIG3}"), "c").unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
