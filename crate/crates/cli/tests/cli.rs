use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn rwre(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rwre"));
    cmd.args(args).env_remove("RWRE_SEED");
    if let Some(s) = env_seed {
        cmd.env("RWRE_SEED", s);
    }
    cmd.output().unwrap()
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let start = line.find(&format!(" {key}="))? + key.len() + 2;
    let rest = &line[start..];
    Some(match rest.strip_prefix('"') {
        Some(q) => &q[..q.find('"').unwrap()],
        None => rest.split([' ', '\n']).next().unwrap(),
    })
}

#[test]
fn drift_is_exactly_zero() {
    let o = rwre(&["--config", &config("drift.toml")], None);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.contains(r#"drift="[0/1, 0/1]""#), "{line}");
    assert_eq!(field(&line, "version"), Some(env!("CARGO_PKG_VERSION")));
    assert_eq!(field(&line, "config_digest").unwrap().len(), 64);
}

#[test]
fn cylinder_audit_passes_and_emits_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = rwre(&["--config", &config("cylinder-audit.toml"), "--out", &out, "--emit-dot"], None);
    assert_eq!(o.status.code(), Some(0));
    let line = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert_eq!(line, stdout(&o));
    assert_eq!(field(&line, "divergence_max"), Some("0/1"));
    assert_eq!(field(&line, "class_sums_equal"), Some("true"));
    assert_eq!(field(&line, "vertices"), Some("94"));
    let dot = std::fs::read_to_string(dir.path().join("cylinder.dot")).unwrap();
    assert!(dot.starts_with("digraph cylinder {") && dot.contains("label=\"DEL\""));
}

#[test]
fn drifted_audit_tracks_the_drift_sign() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let src = std::fs::read_to_string(configs().join("cylinder-audit.toml")).unwrap();
    std::fs::write(&cfg, src.replace(r#"["2", "2", "1"]"#, r#"["1", "1", "1"]"#)).unwrap();
    let o = rwre(&["--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert_eq!(field(&line, "drift_gap"), Some("-8/1"));
    assert_eq!(field(&line, "drift_dot_u"), Some("-2/3"));
    assert_eq!(field(&line, "class_sums_equal"), Some("false"));
}

#[test]
fn loop_reversal_at_del() {
    let o = rwre(&["--config", &config("loop-reversal.toml"), "--trials", "20000"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    assert_eq!(field(&line, "exact"), Some("0.5"));
    assert_eq!(field(&line, "predecessor"), Some("M"));
    assert_eq!(field(&line, "within_4se"), Some("true"));
}

#[test]
fn loop_reversal_on_drifted_cylinder_is_a_property_failure() {
    // nonzero divergence at DEL: the 1/2 identity no longer applies
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let src = std::fs::read_to_string(configs().join("loop-reversal.toml")).unwrap();
    std::fs::write(&cfg, src.replace(r#"["2", "2", "1"]"#, r#"["1", "1", "1"]"#)).unwrap();
    let o = rwre(&["--config", cfg.to_str().unwrap(), "--trials", "20000"], None);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "divergence_free"), Some("false"));
}

#[test]
fn malformed_configs_exit_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("experiment = \"drift\"\n\n[law]\njumps = [[0, 1]]\nweights = [\"1/0\"]\n", 5),
        ("experiment = \"drift\"\ntrials = 0\n[law]\njumps = [[0, 1]]\nweights = [1]\n", 2),
        ("experiment = \"drift\"\n[law]\njumps = [[0, 1]]\nweights = [1]\nbogus = 3\n", 5),
        ("experiment = \"transience\"\nb = 5.0\n[law]\njumps = [[0, 1]]\nweights = [1]\n", 1),
    ];
    for (i, (src, line)) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("{i}.toml"));
        std::fs::write(&cfg, src).unwrap();
        let o = rwre(&["--config", cfg.to_str().unwrap()], None);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        let err = String::from_utf8(o.stderr).unwrap();
        let want = format!("error: {}:{line}: ", cfg.display());
        assert!(err.starts_with(&want), "case {i}: {err}");
    }
    let o = rwre(&["--config", "/nonexistent/x.toml"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_precedence() {
    let seed_of = |o: &Output| field(&stdout(o), "seed").unwrap().to_string();
    let drift = config("drift.toml");
    assert_eq!(seed_of(&rwre(&["--config", &drift], None)), "0");
    assert_eq!(seed_of(&rwre(&["--config", &drift], Some("42"))), "42");
    assert_eq!(seed_of(&rwre(&["--config", &drift, "--seed", "7"], Some("42"))), "7");
    // the transience config sets seed = 1, which beats the environment
    let t = config("transience.toml");
    assert_eq!(seed_of(&rwre(&["--config", &t, "--trials", "10"], Some("42"))), "1");
    assert_eq!(rwre(&["--config", &drift], Some("x")).status.code(), Some(2));
}

#[test]
fn per_trial_output_is_worker_independent() {
    let runs: Vec<Vec<u8>> = ["1", "3", "1"]
        .iter()
        .map(|w| {
            let dir = tempfile::tempdir().unwrap();
            let out = dir.path().display().to_string();
            let args = ["--config", &config("two-walk.toml"), "--trials", "200", "--workers", w, "--per-trial", "--out", &out];
            let o = rwre(&args, None);
            assert_eq!(o.status.code(), Some(0));
            std::fs::read(dir.path().join("trials.ndjson")).unwrap()
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(runs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 200);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["config_digest"].is_string() && v["seed"] == 1 && v["version"] == env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn emit_dot_needs_a_cylinder() {
    let o = rwre(&["--config", &config("drift.toml"), "--emit-dot"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_sample_config_runs() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let o = rwre(&["--config", p.to_str().unwrap(), "--trials", "300"], None);
        assert_eq!(o.status.code(), Some(0), "{}: {}", p.display(), String::from_utf8_lossy(&o.stderr));
    }
}
