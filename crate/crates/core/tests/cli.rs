//! End-to-end runs of the `reeb-lab` binary: exit codes, determinism and schemas.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_reeb-lab"));
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    format!("examples/data/{name}")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let s: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::draft202012::new(&s).expect("schema compiles")
}

fn assert_valid(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{}: {e}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn every_json_output_matches_its_schema() {
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("cz_index", vec!["cz-index".into(), "--quadratic".into(), data("quadratic.json")]),
        ("cz_index", vec!["cz-index".into(), "--rho".into(), "0.3".into()]),
        ("williamson", vec!["williamson".into(), "--matrix".into(), data("unipotent.json")]),
        (
            "hamiltonian",
            "hamiltonian --family cubic --slope 6 --r-max 2 --theta 0.5 --grid 16 --claim1 1.5 --transfer-k 2 --lambda 1 --taus 5"
                .split(' ')
                .map(String::from)
                .collect(),
        ),
        ("hamiltonian", "hamiltonian --family exponential --slope 6 --r-max 2.5 --gamma 1.5 --base -0.5 --grid 8".split(' ').map(String::from).collect()),
        ("ellipsoid", "ellipsoid --weights 1,1.4142135623730951 --convexity --cutoff 12 --seed-instance".split(' ').map(String::from).collect()),
        ("ellipsoid", "ellipsoid --weights 1,2,3 --convexity".split(' ').map(String::from).collect()),
        ("barcode", vec!["barcode".into(), "--complex".into(), data("complex.json"), "--c-bar".into(), "1".into(), "--level".into(), "10".into()]),
        ("barcode", vec!["barcode".into(), "--complex".into(), data("complex.json")]),
        ("graph_validation", vec!["barcode".into(), "--graph".into(), data("graph.json"), "--n".into(), "2".into(), "--check-degrees".into()]),
        ("audit_report", vec!["audit-lemma".into(), "--system".into(), data("golden_system.json"), "--mode".into(), "theoremB".into()]),
        ("audit_report", vec!["audit-lemma".into(), "--system".into(), data("flagship_system.json"), "--count".into(), "2".into()]),
        (
            "fixed_point",
            vec![
                "fixed-point-index".into(),
                "--model".into(),
                "monkey-saddle".into(),
                "--lefschetz".into(),
                data("lefschetz.json"),
                "--trace-matrix".into(),
                data("trace_matrix.json"),
            ],
        ),
        ("fixed_point", vec!["fixed-point-index".into(), "--samples".into(), data("monkey_saddle.csv")]),
        ("fuzz", "fuzz --cases 10 --seed 3".split(' ').map(String::from).collect()),
    ];
    for (name, args) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let doc = stdout_json(&run(&args));
        assert_valid(name, &doc);
    }
}

#[test]
fn recurrence_lines_match_schema() {
    let out = run(&["recurrence-search", "--profiles", &data("sqrt2_profiles.json"), "--eta", "0.1", "--ell0", "3", "--k-bound", "1000000", "--count", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let ds: Vec<i64> = lines
        .iter()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            assert_valid("recurrence_solution", &v);
            v["d"].as_i64().unwrap()
        })
        .collect();
    assert_eq!(ds, [58, 82, 140]);
}

#[test]
fn out_file_gets_json_and_stdout_gets_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["audit-lemma", "--system", &data("flagship_system.json"), "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("d = 198"), "{summary}");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid("audit_report", &doc);
    assert_eq!(doc["passed"], Value::Bool(true));
}

fn bytes_of(args: &[&str], dir: &Path, tag: &str) -> Vec<u8> {
    let path: PathBuf = dir.join(tag);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    assert!(run(&full).status.success());
    fs::read(&path).unwrap()
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["audit-lemma", "--system", "examples/data/flagship_system.json"],
        vec!["fuzz", "--cases", "25", "--seed", "11"],
        vec!["recurrence-search", "--ellipsoid", "1,1.4142135623730951", "--count", "3"],
        vec!["iterate-indices", "--profile", "examples/data/profile.json", "--k-max", "30"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = bytes_of(args, dir.path(), &format!("{i}a"));
        let b = bytes_of(args, dir.path(), &format!("{i}b"));
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?} is not deterministic");
    }
    // thread count does not change the report
    let one = bin()
        .env("REEB_LAB_THREADS", "1")
        .args(["audit-lemma", "--system", "examples/data/flagship_system.json"])
        .output()
        .unwrap();
    let four = bin()
        .env("REEB_LAB_THREADS", "4")
        .args(["audit-lemma", "--system", "examples/data/flagship_system.json"])
        .output()
        .unwrap();
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn exit_codes() {
    // validation errors
    assert_eq!(run(&["williamson", "--matrix", "no/such/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["cz-index", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["ellipsoid", "--weights", "1,-2"]).status.code(), Some(2));
    assert_eq!(run(&["audit-lemma", "--system", &data("flagship_system.json"), "--mode", "theoremB"]).status.code(), Some(2));
    let bad_threads = bin().env("REEB_LAB_THREADS", "zero").args(["cz-index", "--rho", "0.2"]).output().unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));

    // failed checks
    let short = run(&["barcode", "--graph", &data("graph.json"), "--n", "2", "--protect", "0=1.0"]);
    assert_eq!(short.status.code(), Some(3));
    let doc: Value = serde_json::from_slice(&short.stdout).unwrap();
    assert_valid("graph_validation", &doc);
    assert_eq!(doc["violations"][0]["kind"], "short_protected");

    let dir = tempfile::tempdir().unwrap();
    let mut sys: Value = serde_json::from_str(&fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(data("golden_system.json"))).unwrap()).unwrap();
    sys["eta"] = Value::from(0.12);
    let sys_path = dir.path().join("loose.json");
    fs::write(&sys_path, sys.to_string()).unwrap();
    let report_path = dir.path().join("report.json");
    let failed = run(&["audit-lemma", "--system", sys_path.to_str().unwrap(), "--mode", "theoremB", "--out", report_path.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(3));
    let report: Value = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_valid("audit_report", &report);
    assert_eq!(report["passed"], Value::Bool(false));
    assert_eq!(report["failure"]["case"], "Case1");
}

#[test]
fn config_file_flags_lose_to_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"weights": [1, 3], "k_max": 5, "convexity": true}"#).unwrap();
    let from_cfg = stdout_json(&run(&["ellipsoid", "--config", cfg.to_str().unwrap()]));
    assert_eq!(from_cfg["weights"], serde_json::json!([1.0, 3.0]));
    let overridden = stdout_json(&run(&["ellipsoid", "--config", cfg.to_str().unwrap(), "--weights", "1,2.5"]));
    assert_eq!(overridden["weights"], serde_json::json!([1.0, 2.5]));
    fs::write(&cfg, r#"{"no_such_key": 1}"#).unwrap();
    assert_eq!(run(&["ellipsoid", "--weights", "1,2", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_outputs_have_headers() {
    let idx = run(&["iterate-indices", "--profile", &data("profile.json"), "--k-max", "3"]);
    assert!(idx.status.success());
    assert!(String::from_utf8(idx.stdout).unwrap().starts_with("k,mu_minus,mu_plus,mu_hat"));
    let bars = run(&["barcode", "--complex", &data("complex.json"), "--format", "csv"]);
    let text = String::from_utf8(bars.stdout).unwrap();
    assert!(text.starts_with("birth,death,degree") && text.contains(",inf,"), "{text}");
    let spec = run(&["ellipsoid", "--weights", "1,1.5", "--cutoff", "10", "--format", "csv"]);
    let text = String::from_utf8(spec.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "value,j,k");
    // π, 1.5π, 2π, 3π, 3π
    assert_eq!(rows.len(), 6, "{text}");
    assert_eq!(run(&["ellipsoid", "--weights", "1,1.5", "--format", "csv"]).status.code(), Some(2));
}
