use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fastmix(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastmix"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"
[model]
grid = [3, 3]

[data]
count = 4
seed = 7

[constraint]
kind = "box"
beta = 0.2

[learner]
lambda = 1.0
lipschitz = 10.0
iterations = 4
samples = 30
chain_length = 20
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn plan_echoes_grid_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let o = fastmix(&["plan"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("K = 46\n"), "{text}");
    assert!(text.contains("M = 1533\n"), "{text}");
    assert!(text.contains("lower bound"));
}

#[test]
fn strongly_convex_without_ridge_is_a_mode_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "[learner]\nlambda = 0.0\n");
    let o = fastmix(
        &["plan", "--config", &cfg, "--mode", "strongly-convex"],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("mode error"), "{}", stderr(&o));
    let o = fastmix(&["plan", "--config", &cfg, "--mode", "convex"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("mode: convex"));
}

#[test]
fn vacuous_box_explains_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "[model]\ngrid = [3, 3]\n[constraint]\nbeta = 0.3\n",
    );
    let o = fastmix(&["plan", "--config", &cfg], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("tanh"), "{}", stderr(&o));
}

#[test]
fn zero_iterations_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &SMALL.replace("iterations = 4", "iterations = 0"),
    );
    let o = fastmix(&["train", "--config", &cfg, "--out", "o"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("at least 1"), "{}", stderr(&o));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn training_is_deterministic_and_exports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL);
    for out in ["a", "b"] {
        let o = fastmix(
            &["train", "--config", &cfg, "--seed", "5", "--out", out],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |p: &str| fs::read_to_string(dir.path().join(p)).unwrap();
    let a = read("a/trace.csv");
    assert_eq!(a, read("b/trace.csv"));
    let summary = fs::read_to_string(dir.path().join("a/summary.txt")).unwrap();
    assert!(summary.contains("final distance"), "{summary}");

    let o = fastmix(
        &["train", "--config", &cfg, "--seed", "6", "--out", "c"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_ne!(a, read("c/trace.csv"));

    let o = fastmix(&["export", "a/trace.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), a);
    let o = fastmix(&["export", "a/trace.json", "--out", "x"], dir.path());
    assert!(o.status.success());
    assert_eq!(read("x/trace.csv"), a);
}

#[test]
fn planned_schedule_fed_back_gives_identical_run() {
    let dir = tempfile::tempdir().unwrap();
    let base =
        "[model]\ngrid = [2, 2]\n[data]\ncount = 3\n[learner]\nlambda = 1.0\nlipschitz = 10.0\n\
                epsilon = 4.0\nbetas = [0.4, 0.4, 0.2]\n";
    let cfg = write_config(dir.path(), "p.toml", base);
    let o = fastmix(&["plan", "--config", &cfg], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let get = |key: &str| {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .to_string()
    };
    let explicit = format!(
        "{base}iterations = {}\nsamples = {}\nchain_length = {}\n",
        get("K = "),
        get("M = "),
        get("v = ")
    );
    let cfg2 = write_config(dir.path(), "e.toml", &explicit);
    assert!(
        fastmix(&["train", "--config", &cfg, "--out", "p"], dir.path())
            .status
            .success()
    );
    assert!(
        fastmix(&["train", "--config", &cfg2, "--out", "e"], dir.path())
            .status
            .success()
    );
    assert_eq!(
        fs::read(dir.path().join("p/trace.csv")).unwrap(),
        fs::read(dir.path().join("e/trace.csv")).unwrap()
    );
}

#[test]
fn verify_runs_only_the_selected_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = fastmix(&["verify", "--suite", "mixing", "--out", "v"], dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let tsv = fs::read_to_string(dir.path().join("v/summary.tsv")).unwrap();
    let rows: Vec<&str> = tsv.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(
        rows.iter()
            .all(|r| r.starts_with("mixing\t") && r.ends_with("PASS")),
        "{tsv}"
    );
    assert!(dir.path().join("v/report.txt").exists());
}

#[test]
fn verify_rejects_bad_certificate_and_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "[certificate]\nbig_c = 16.0\nalpha = 1.0\n",
    );
    let o = fastmix(
        &[
            "verify", "--config", &cfg, "--suite", "analytic", "--out", "v",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("certificate"), "{}", stderr(&o));
    assert!(!dir.path().join("v").exists());

    let o = fastmix(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown suite"));
}

#[test]
fn missing_config_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = fastmix(&["plan", "--config", "absent.toml"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("absent.toml"));
}

#[test]
fn reproduce_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let o = fastmix(&["reproduce", "--out", "r"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("K=46, M=1533, v=561"), "{text}");
    assert!(text.contains("all runs within epsilon_theta = 2: yes"));
    for run in 0..5 {
        let curves = fs::read_to_string(dir.path().join(format!("r/run{run}_curves.csv"))).unwrap();
        assert_eq!(curves.lines().count(), 1 + 47);
        let last: Vec<f64> = curves
            .lines()
            .last()
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(last[0], 46.0);
        assert!(last[2] <= 2.0);
    }
    assert_eq!(
        fs::read_to_string(dir.path().join("r/data.txt"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        5
    );
}
