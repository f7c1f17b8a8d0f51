use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn powerpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerpart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn powerpart_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerpart"))
        .args(args)
        .env("POWERPART_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn validate(schema_file: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&powerpart(args))).unwrap()
}

#[test]
fn count_squares_has_eleven_rows() {
    let text = stdout(&powerpart(&["count", "--kind", "unrestricted", "--k", "2", "--n-max", "10"]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[4], "4,2");
}

#[test]
fn count_json_is_exact_and_valid() {
    let v = json(&["count", "--k", "1", "--n-max", "300", "--format", "json"]);
    validate("count.schema.json", &v);
    assert_eq!(v["coeffs"][300], "9253082936723602");
}

#[test]
fn constants_json() {
    let v = json(&["constants", "--k", "1"]);
    validate("constants.schema.json", &v);
    assert_eq!(v["beta"].as_f64().unwrap(), 2.56509966032373);
    for k in ["2", "3", "6"] {
        validate("constants.schema.json", &json(&["constants", "--k", k, "--m-max", "4"]));
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["count", "--k", "0", "--n-max", "5"][..],
        &["count", "--k", "1"],
        &["count", "--k", "1", "--n-max", "5", "--unknown"],
        &["diagnose", "--k", "1", "--suite", "nope"],
        &["frobnicate"],
    ] {
        let out = powerpart(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(powerpart_threads(&["constants", "--k", "1"], "zero").status.code(), Some(2));
}

#[test]
fn computation_errors_exit_1_naming_the_parameter() {
    let out = powerpart(&["family", "--k", "1", "--s", "-0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains('s'));
    let out = powerpart(&["ratio-table", "--k", "1", "--n-grid", "3,2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
    let out = powerpart(&["count", "--k", "1", "--n-max", "1000000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("largest feasible n"));
}

#[test]
fn family_csv_and_json() {
    let text = stdout(&powerpart(&["family", "--k", "1", "--s", "0.1", "--theta-grid", "0:2:5"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,mean,variance,theta,re,im");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].ends_with(",0,1,0"), "{}", lines[1]);
    let v = json(&["family", "--kind", "distinct", "--k", "2", "--s", "0.1", "--format", "json"]);
    validate("family.schema.json", &v);
    let v = json(&["family", "--k", "2", "--s", "0.1", "--draws", "50", "--seed", "3", "--format", "json"]);
    validate("family.schema.json", &v);
    assert_eq!(v["samples"].as_array().unwrap().len(), 50);
}

#[test]
fn asymptotic_methods() {
    for (kind, method) in [
        ("unrestricted", "bd"),
        ("unrestricted", "exact"),
        ("unrestricted", "hr"),
        ("distinct", "bd"),
        ("distinct", "exact"),
        ("distinct", "qk"),
    ] {
        let v = json(&["asymptotic", "--kind", kind, "--k", "2", "--n", "1000", "--method", method]);
        validate("asymptotic.schema.json", &v);
        assert_eq!(v["heuristic"], Value::Bool(kind == "distinct" && (method == "bd" || method == "exact")));
    }
    let v = json(&["asymptotic", "--k", "1", "--n", "1000", "--method", "exact"]);
    assert!(v["residual"].as_f64().unwrap().abs() <= 1e-10 * 1000.0);
}

#[test]
fn ratio_table_k1_decreasing() {
    let text = stdout(&powerpart(&["ratio-table", "--k", "1", "--n-grid", "geometric:128:8192:7"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,exact_log,estimate_log,ratio"));
    let dev: Vec<f64> = lines
        .map(|l| (l.split(',').nth(3).unwrap().parse::<f64>().unwrap() - 1.0).abs())
        .collect();
    assert_eq!(dev.len(), 7);
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
}

#[test]
fn ratio_table_k3_up_to_ten_thousand() {
    let start = std::time::Instant::now();
    let text = stdout(&powerpart(&["ratio-table", "--k", "3", "--n-grid", "geometric:1000:10000:5", "--method", "all"]));
    assert_eq!(text.lines().count(), 6);
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn diagnose_reports_validate() {
    for suite in ["gauss", "bd", "em", "twl"] {
        let v = json(&["diagnose", "--k", "1", "--suite", suite]);
        validate("diagnostics_report.schema.json", &v);
        let grid = v["grid"].as_array().unwrap().len();
        for values in v["metrics"].as_object().unwrap().values() {
            assert_eq!(values.as_array().unwrap().len(), grid);
        }
    }
    let v = json(&["diagnose", "--kind", "distinct", "--k", "2", "--suite", "twl"]);
    assert_eq!(v["exploratory"], Value::Bool(true));
}

#[test]
fn diagnose_all_and_csv() {
    let v = json(&["diagnose", "--k", "1", "--suite", "all", "--seed", "5"]);
    validate("diagnostics_report.schema.json", &v);
    assert_eq!(v["reports"].as_array().unwrap().len(), 6);
    let text = stdout(&powerpart(&["diagnose", "--k", "1", "--suite", "em", "--csv"]));
    assert_eq!(text.lines().next(), Some("suite,metric,s,value"));
    assert!(text.lines().any(|l| l.starts_with("em,abs_diff,,")));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["diagnose", "--k", "1", "--suite", "clt", "--seed", "11"];
    let a = powerpart_threads(&args, "1");
    let b = powerpart_threads(&args, "4");
    assert_eq!(stdout(&a), stdout(&b));
    let args = ["family", "--k", "2", "--s", "0.05", "--draws", "5000", "--seed", "9"];
    assert_eq!(stdout(&powerpart_threads(&args, "2")), stdout(&powerpart_threads(&args, "3")));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = powerpart(&["count", "--k", "1", "--n-max", "20", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().last(), Some("20,627"));
}

#[test]
fn every_estimator_improves_for_both_kinds() {
    for kind in ["unrestricted", "distinct"] {
        let text = stdout(&powerpart(&[
            "ratio-table", "--kind", kind, "--k", "1", "--n-grid", "geometric:64:8192:8", "--method", "all",
        ]));
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        for col in 5..8 {
            let dev: Vec<f64> = rows.iter().map(|r| (r[col] - 1.0).abs()).collect();
            assert!(dev.windows(2).all(|w| w[1] < w[0]), "{kind} column {col}: {dev:?}");
        }
    }
}

#[test]
fn zero_coefficient_has_no_ratio() {
    // 128 is the largest integer that is not a sum of distinct squares
    let out = powerpart(&["ratio-table", "--kind", "distinct", "--k", "2", "--n-grid", "100,128"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a_128 is zero"));
    assert!(powerpart(&["ratio-table", "--kind", "distinct", "--k", "2", "--n-grid", "129,1000"]).status.success());
}
