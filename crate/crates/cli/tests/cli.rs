use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bernstein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bernstein")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// The top-level shape promised by the schema file.
fn assert_conforms(report: &Value) {
    let schema = schema();
    let obj = report.as_object().unwrap();
    for key in schema["required"].as_array().unwrap() {
        assert!(obj.contains_key(key.as_str().unwrap()), "missing {key}");
    }
    let allowed = schema["properties"].as_object().unwrap();
    for key in obj.keys() {
        assert!(allowed.contains_key(key), "unexpected {key}");
    }
    assert_eq!(report["schema_version"], schema["properties"]["schema_version"]["const"]);
    let commands = schema["properties"]["command"]["enum"].as_array().unwrap();
    assert!(commands.contains(&report["command"]));
    let all = report["assertions"].as_array().unwrap().iter().all(|a| a["pass"] == true);
    assert_eq!(report["pass"], all);
}

#[test]
fn center_of_the_heisenberg_group() {
    let out = bernstein(&["center", "--group", "heisenberg3", "--p", "3", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_conforms(&r);
    assert_eq!(r["results"]["center_dim"], 11);
    assert_eq!(r["results"]["bimodule_end_dim"], 11);
    assert_eq!(r["config"]["seed"], 42);
}

#[test]
fn nonclosed_witness() {
    let out = bernstein(&["nonclosed-delta", "--p", "2", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_conforms(&r);
    assert_eq!(r["results"]["witness"]["orbit_sizes"], serde_json::json!([1, 2, 4, 8, 16]));
}

#[test]
fn mackey_dimension_for_s3_over_a3() {
    let out = bernstein(&["mackey-dim", "--g", "s3", "--u", "a3", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_conforms(&r);
    assert_eq!(r["results"]["omega"]["commutant_dim"], 4);
    assert_eq!(r["results"]["omega"]["sum_fixed_dims"], 4);
}

#[test]
fn every_subcommand_conforms() {
    for args in [
        vec!["orbits"],
        vec!["orbits", "--action", "regular", "--group", "d4", "--p", "2"],
        vec!["tower-density", "--p", "3", "--depth", "4"],
        vec!["tower-density", "--tower", "heisenberg3", "--p", "3", "--depth", "2"],
        vec!["twisted-stab", "--depth", "2", "--w", "diag(1,2,4)"],
        vec!["twisted-stab", "--depth", "2", "--w", "[1,0,0,0,2,0,0,0,1]"],
        vec!["zhat", "--spec", "qp-units", "--samples", "20"],
    ] {
        let out = bernstein(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_conforms(&json(&out));
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(bernstein(&["center", "--group", "nonsense"]).status.code(), Some(2));
    assert_eq!(bernstein(&["center", "--p", "4"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_bernstein"))
        .args(["center", "--group", "s4"])
        .env("BERNSTEIN_GROUP_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_bernstein"))
        .args(["center"])
        .env("BERNSTEIN_GROUP_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_and_text_outputs() {
    let out = bernstein(&["center", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("table,size,count"));
    assert_eq!(lines.collect::<Vec<_>>(), vec!["class_sizes,1,3", "class_sizes,3,8"]);

    let out = bernstein(&["mackey-dim", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("bernstein mackey-dim — PASS"));
    assert!(text.contains("[pass] omega_dimension_equality"));
}

#[test]
fn output_file_and_timings() {
    let dir = std::env::temp_dir().join(format!("bernstein-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = bernstein(&["nonclosed-delta", "--record-timings", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_conforms(&r);
    assert!(r["timings_ms"].is_object());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn same_seed_same_bytes() {
    let a = bernstein(&["zhat", "--seed", "7", "--samples", "30"]);
    let b = bernstein(&["zhat", "--seed", "7", "--samples", "30"]);
    assert_eq!(a.stdout, b.stdout);
    let c = bernstein(&["zhat", "--seed", "8", "--samples", "30"]);
    assert_eq!(json(&c)["config"]["seed"], 8);
}
