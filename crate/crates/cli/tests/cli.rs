//! End-to-end runs of the binary: file formats and exit codes.

use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
seed = 9
[kernel]
variant = "ParetoTail"
alpha = 0.3
[marks]
variant = "ParetoMean1"
beta = 0.6
[clt]
t_grid = [20.0]
replicas = 500
cells = 400
lambdas = [1.0]
[limit]
paths = 200
dt = 0.0625
scale = 20.0
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_critical-hawkes"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    let cfg = dir.join("cfg.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    bin().arg("--config").arg(&cfg).arg("--out-dir").arg(dir).args(args).output().unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(bin().arg("no-such-command").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("clt").output().unwrap().status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, CONFIG.replace("alpha = 0.3", "alpha = 0.8")).unwrap();
    let out = bin().arg("--config").arg(&bad).arg("clt").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha < beta"));
}

#[test]
fn resolvent_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = bin()
        .args(["resolvent", "--kernel", "ParetoTail", "--alpha", "0.5", "--dt", "0.5", "--horizon", "50", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["k", "t", "m", "r", "I_R"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 100);
    let i_r: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(i_r.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    std::fs::create_dir_all(&a).unwrap();
    std::fs::create_dir_all(&b).unwrap();
    assert!(run(&a, &["--threads", "1", "simulate", "--horizon", "40", "--replicas", "6"]).status.success());
    assert!(run(&b, &["--threads", "3", "simulate", "--horizon", "40", "--replicas", "6"]).status.success());
    for f in ["events.csv", "counts.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = std::fs::read_to_string(a.join("events.csv")).unwrap();
    assert!(header.starts_with("replica,id,parent,generation,time,mark\n"));
    let counts = std::fs::read_to_string(a.join("counts.csv")).unwrap();
    assert!(counts.starts_with("replica,t,N\n"));
}

#[test]
fn laplace_solve_json_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["laplace-solve", "--f", "indicator:0:1", "--scale", "100", "--cells", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("laplace.json")).unwrap()).unwrap();
    for key in ["config", "exact_mean", "log_laplace", "target", "rel_error"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config"]["seed"], 9);
    assert!(v["target"].as_f64().unwrap() > 0.0);
}

#[test]
fn report_and_clt_exit_codes_follow_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["report", "--only", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS criterion 9"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
    // at T = 20 the Pareto kernel is far from the limit: asymptotic checks fail
    let out = run(dir.path(), &["clt"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("clt_report.json")).unwrap()).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().filter(|c| c["name"].as_str().unwrap().contains("finite-T")).all(|c| c["pass"] == true));
}

#[test]
fn limit_paths_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["limit", "--dump-paths", "2"]);
    assert!(matches!(out.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("limit_paths.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path_id,t,zeta"));
    assert_eq!(lines.next(), Some("0,0.0,0.0"));
}
