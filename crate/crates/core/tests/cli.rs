use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn qhgeo(scenario: &Path, report: &Path, extra: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_qhgeo"))
        .arg("run")
        .arg("--scenario")
        .arg(scenario)
        .arg("--report")
        .arg(report)
        .args(extra)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const SMALL: &str = r#"{
  "schema": 1, "seed": 8,
  "domains": [
    { "name": "square", "kind": "square", "params": { "side": 1.0 }, "resolution": 0.05 }
  ],
  "checks": [
    { "id": "lemma_b", "domain": "square", "pairs": 500 },
    { "id": "ball_containment", "domain": "square", "centers": 20 },
    { "id": "hyperbolicity", "domain": "square", "pool": 20, "quadruples": 200 }
  ]
}"#;

#[test]
fn passing_scenario_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ledger.json");
    assert_eq!(qhgeo(&scenario("constants_ledger.json"), &out, &[]), 0);
    let r = read_json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 7);
    let c2 = &r["checks"][1]["comparisons"];
    let c2 = c2.as_array().unwrap().iter().find(|c| c["name"] == "c2").unwrap();
    assert!((c2["measured"].as_f64().unwrap() - 83.43).abs() < 0.01);
}

#[test]
fn violated_check_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL.replace(r#""seed": 8,"#, r#""seed": 8, "tolerances": { "slack": 0.5, "containment_slack": 0.5 },"#);
    let s = write(dir.path(), "tight.json", &text);
    let out = dir.path().join("r.json");
    assert_eq!(qhgeo(&s, &out, &[]), 1);
    let r = read_json(&out);
    assert_eq!(r["passed"], false);
    for i in 0..2 {
        let c = &r["checks"][i];
        assert_eq!(c["status"], "fail", "{c}");
        let w = c["witnesses"].as_array().unwrap();
        assert!(!w.is_empty());
        assert!(!w[0]["points"].as_array().unwrap().is_empty());
    }
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cases = [
        ("unknown_domain.json", SMALL.replace(r#""domain": "square", "pairs""#, r#""domain": "circle", "pairs""#)),
        ("bad_lambda.json", SMALL.replace(
            r#""checks": ["#,
            r#""mappings": [{ "name": "id", "source": "square", "map": { "id": "identity" },
                "target": { "kind": "square", "params": { "side": 1.0 } } }],
              "checks": [{ "id": "theorem1_chain", "mapping": "id", "lambda": 1.5 },"#,
        )),
        ("empty_grid.json", SMALL.replace(r#""resolution": 0.05"#, r#""resolution": 5.0"#)),
        ("not_json.json", "{ schema: 1".to_string()),
    ];
    for (name, text) in cases {
        let s = write(dir.path(), name, &text);
        assert_eq!(qhgeo(&s, &out, &[]), 2, "{name}");
    }
    assert_eq!(qhgeo(&dir.path().join("missing.json"), &out, &[]), 2);
    assert_eq!(qhgeo(&scenario("constants_ledger.json"), &out, &["--resolution-override", "-1"]), 2);
}

#[test]
fn csv_has_one_row_per_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "small.json", SMALL);
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    assert_eq!(qhgeo(&s, &json, &[]), 0);
    assert_eq!(qhgeo(&s, &csv, &["--format", "csv"]), 0);
    let r = read_json(&json);
    let comparisons: usize = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["comparisons"].as_array().unwrap().len())
        .sum();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "check_index,check_id,subject,constant,measured,predicted,relation,pass");
    assert_eq!(lines.count(), comparisons);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "small.json", SMALL);
    let (a, b, c) = (dir.path().join("a.json"), dir.path().join("b.json"), dir.path().join("c.json"));
    assert_eq!(qhgeo(&s, &a, &["--jobs", "1"]), 0);
    assert_eq!(qhgeo(&s, &b, &[]), 0);
    assert_eq!(qhgeo(&s, &c, &["--seed", "9"]), 0);
    let (a, b, c) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), std::fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn resolution_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "small.json", SMALL);
    let out = dir.path().join("r.json");
    assert_eq!(qhgeo(&s, &out, &["--resolution-override", "0.1"]), 0);
    let r = read_json(&out);
    assert_eq!(r["resolutions"]["square"], 0.1);
    assert_eq!(r["seed"], 8);
}
