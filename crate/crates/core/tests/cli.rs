use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bm-stability");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("BM_STABILITY_THREADS", "1").output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn scan_config(extra: &str) -> String {
    format!(
        r#"{{
        "schema_version": 1, "n": 2, "resolution": 48,
        "measure": {{"kind": "gaussian"}},
        "perturbation": {{"kind": "additive", "terms": [{{"coeff": 1.0, "powers": [0, 0]}}, {{"coeff": 0.3, "cos": 2}}]}},
        "lambda_steps": 4, "seed": 5, {extra}
    }}"#
    )
}

#[test]
fn scan_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &scan_config(r#""epsilon_max": 0.05, "checks": ["scan_dim_bm"]"#));
    let out = dir.path().join("out");
    let o = run(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "check,n,radius,measure,eps1,eps2,lambda,margin,pass,oracle_diff,seed,expected_failure"
    );
    let rows: Vec<&str> = lines.collect();
    // 5 x 5 epsilon pairs, lambda_steps + 1 rows each
    assert_eq!(rows.len(), 25 * 5);
    let first_pair = rows.iter().filter(|r| r.contains(",0.01,0.01,")).count();
    assert_eq!(first_pair, 5);
    assert!(rows.iter().all(|r| r.starts_with("scan_dim_bm,2,1.0,gaussian,") && r.contains(",true,")));
    assert!(rows[0].split(',').nth(7).unwrap().contains('e'));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 125);
    assert!(json["header"]["generated_at_unix"].is_u64());
    assert!(fs::read_to_string(out.join("margins.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn epsilon_beyond_validity_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        scan_config(r#""epsilon_max": 0.05, "checks": ["scan_dim_bm"]"#).replace("0.3, \"cos\"", "40.0, \"cos\"");
    let cfg = write_config(dir.path(), "c.json", &text);
    let o = run(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon exceeds validity radius a="));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &scan_config(r#""epsilon_max": 0.05, "checks": ["scan_dim_bm"], "lamda": 3"#),
    );
    let o = run(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lamda"));
    let cfg = write_config(dir.path(), "d.json", &scan_config(r#""epsilon_max": 0.0, "checks": ["scan_dim_bm"]"#));
    let o = run(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon_max"));
}

#[test]
fn shift_counterexample_is_a_passing_negative_demonstration() {
    let dir = tempfile::tempdir().unwrap();
    let text = scan_config(r#""epsilon_max": 0.05, "checks": ["shift_counterexample"], "t": 0.3, "lambda": 0.5"#)
        .replace("\"resolution\": 48", "\"resolution\": 256");
    let cfg = write_config(dir.path(), "c.json", &text);
    let out = dir.path().join("o");
    let o = run(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("shift_counterexample,") && row.ends_with(",true"), "{row}");
}

#[test]
fn identical_seeds_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &scan_config(r#""epsilon_max": 0.05, "checks": ["b1_b2", "scan_log_bm"], "monte_carlo": {"samples": 50000}"#),
    );
    let read = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let json = fs::read_to_string(out.join("report.json")).unwrap();
        let body: String = json.lines().filter(|l| !l.contains("generated_at_unix")).collect();
        (body, fs::read(out.join("report.csv")).unwrap())
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn verify_identities_and_fault_injection() {
    let o = run(&["verify-identities", "--n", "2", "--resolution", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let dir = tempfile::tempdir().unwrap();
    // f = exp(-r^2/2) with f' off by a factor 2
    let corrupted = r#"{
        "schema_version": 1, "n": 2, "resolution": 32,
        "measure": {"kind": "custom",
            "f": [{"poly": [1.0], "neg_log": [0.0, 0.0, 0.5]}],
            "df": [{"poly": [0.0, -2.0], "neg_log": [0.0, 0.0, 0.5]}],
            "d2f": [{"poly": [-1.0, 0.0, 1.0], "neg_log": [0.0, 0.0, 0.5]}]},
        "perturbation": {"kind": "additive", "terms": [{"coeff": 1.0, "cos": 2}]},
        "epsilon_max": 0.05, "checks": ["b1_b2"]
    }"#;
    let cfg = write_config(dir.path(), "bad.json", corrupted);
    let o = run(&["verify-identities", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn demo_shift_and_list_checks() {
    let o = run(&["demo-shift", "--t", "0.3", "--lambda", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("expected failure        true"));
    let o = run(&["list-checks"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 9);
    assert_eq!(run(&["demo-shift", "--t", "1.5"]).status.code(), Some(1));
}
