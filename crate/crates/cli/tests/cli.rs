use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn padyn(args: &[&str], stdin: &str) -> (i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_padyn"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn padyn_json(args: &[&str], stdin: &Value) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out) = padyn(&all, &stdin.to_string());
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad JSON ({e}): {out}")))
}

#[test]
fn polygon_of_cyclotomic_binomial() {
    let (code, v) = padyn_json(&["polygon", "--p", "3", "--N", "16", "--K", "64"], &json!({"series": {"binom": 9}}));
    assert_eq!(code, 0);
    assert_eq!(v["vertices"], json!([[1, "2"], [3, "1"], [9, "0"]]));
    assert_eq!(
        v["root_valuations"],
        json!([{"valuation": "1/2", "count": 2}, {"valuation": "1/6", "count": 6}])
    );
    assert!(v["convention"].is_string());
    assert!(v["full"]["vertices"].is_array());
}

#[test]
fn polygon_text_has_plot() {
    let (code, out) = padyn(&["polygon", "--p", "3", "--N", "16", "--K", "64"], r#"{"series":{"binom":9}}"#);
    assert_eq!(code, 0);
    assert!(out.contains('*'));
    assert!(out.contains("vertices: (1, 2) (3, 1) (9, 0)"));
}

#[test]
fn wideg_and_wprep() {
    let (code, v) = padyn_json(&["wideg", "--p", "3", "--N", "10", "--K", "12"], &json!({"series": {"binom": 3}}));
    assert_eq!((code, v), (0, json!({"wideg": 3})));
    let (code, v) = padyn_json(&["wprep", "--p", "3", "--N", "10", "--K", "12"], &json!({"series": {"binom": 3}}));
    assert_eq!(code, 0);
    assert_eq!(v["wideg"], 3);
    assert!(v["distinguished"]["coeffs"].is_array());
}

#[test]
fn wideg_undetermined_is_a_verdict() {
    let (code, v) = padyn_json(&["wideg", "--p", "3", "--N", "4", "--K", "3"], &json!({"series": {"coeffs": [3, 9, 3]}}));
    assert_eq!(code, 0);
    assert_eq!(v["wideg"], "undetermined");
}

#[test]
fn torsion_check_seed_example() {
    let (code, v) =
        padyn_json(&["torsion-check", "--p", "2", "--N", "72", "--K", "64"], &json!({"f": {"coeffs": [2, 1]}}));
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "integral");
    assert_eq!(v["d2"], "1");
    assert_eq!(v["verified_order"], true);
    assert_eq!(v["precision"]["K"], 64);
    assert!(v["precision"]["N"].as_u64().unwrap() >= 8);
}

#[test]
fn torsion_check_witness() {
    let (code, v) = padyn_json(
        &["torsion-check", "--p", "3", "--N", "20", "--K", "12"],
        &json!({"f": {"coeffs": [3, 0, 1, 1]}}),
    );
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "non-integral");
    assert_eq!(v["witness_index"], 4);
}

#[test]
fn torsion_check_budget_exits_two() {
    let (code, v) =
        padyn_json(&["torsion-check", "--p", "2", "--N", "12", "--K", "12"], &json!({"f": {"coeffs": [2, 1]}}));
    assert_eq!(code, 2);
    assert_eq!(v["error"]["code"], "precision_budget");
}

#[test]
fn malformed_input_exits_one() {
    let (code, out) = padyn(&["wideg", "--p", "3"], "{not json");
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["code"], "malformed_input");

    let (code, v) = padyn_json(&["wideg"], &json!({"series": {"coeffs": [1]}}));
    assert_eq!(code, 1);
    assert_eq!(v["error"]["code"], "malformed_input");

    let (code, v) = padyn_json(&["wideg", "--p", "4"], &json!({"series": {"coeffs": [1]}}));
    assert_eq!(code, 1);
    assert_eq!(v["error"]["code"], "not_prime");
}

#[test]
fn ctx_comes_from_input() {
    let input = json!({"ctx": {"p": 3, "N": 10, "K": 12}, "series": {"binom": 3}});
    let (code, v) = padyn_json(&["wideg"], &input);
    assert_eq!((code, v), (0, json!({"wideg": 3})));
}

#[test]
fn generated_pair_validates_and_checks() {
    for kind in ["gm", "lt", "conjugated"] {
        let (code, pair) =
            padyn_json(&["gen-pair", "--p", "3", "--N", "48", "--K", "16", "--seed", "7"], &json!({"kind": kind}));
        assert_eq!(code, 0, "{kind}");
        let (code, report) = padyn_json(&["validate-pair"], &pair);
        assert_eq!(code, 0, "{kind}");
        assert_eq!(report["is_minimal"], true, "{kind}: {report}");
        let (code, cert) = padyn_json(&["torsion-check"], &pair);
        assert_eq!(code, 0, "{kind}");
        assert_eq!(cert["outcome"], "integral", "{kind}");
    }
}

#[test]
fn json_output_is_stable() {
    let args = ["gen-pair", "--p", "2", "--N", "20", "--K", "10", "--seed", "3"];
    let a = padyn(&[&args[..], &["--json"]].concat(), r#"{"kind":"conjugated"}"#);
    let b = padyn(&[&args[..], &["--json"]].concat(), r#"{"kind":"conjugated"}"#);
    assert_eq!(a, b);
}

#[test]
fn lambda_check_gm() {
    let input = json!({"f": {"binom": 3}, "u": {"binom": 4}, "n": 2, "delta": 1});
    let (code, v) = padyn_json(&["lambda-check", "--p", "3", "--N", "12", "--K", "40"], &input);
    assert_eq!(code, 0);
    assert_eq!(v["equal"], true);
}

#[test]
fn residue_commands() {
    let ones = vec![1; 32];
    let omega = json!({"coeffs": ones, "ring": "residue"});
    let (code, v) = padyn_json(&["order", "--p", "2", "--K", "32"], &json!({"omega": omega, "d_max": 4}));
    assert_eq!(code, 0);
    assert_eq!(v["order"], 2);
    assert_eq!(v["ell"], 2);
    assert_eq!(v["a"], 1);

    let (code, v) = padyn_json(&["zp-iterate", "--p", "2", "--K", "32"], &json!({"omega": omega, "a": 3, "m": 2}));
    assert_eq!(code, 0);
    assert_eq!(v["series"]["coeffs"][0], 1);

    let g0 = json!({"coeffs": [2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1], "ring": "residue"});
    let (code, v) = padyn_json(&["order", "--p", "3", "--K", "12"], &json!({"omega": g0}));
    assert_eq!(code, 0);
    assert_eq!(v["in_nottingham"], false);
}

#[test]
fn commutant_and_linearize() {
    let f = json!({"coeffs": [3, 1], "ring": "float"});
    let (code, v) = padyn_json(&["commutant", "--p", "3", "--N", "12", "--K", "6"], &json!({"f": f, "a": 1}));
    assert_eq!(code, 0);
    assert_eq!(v["series"]["coeffs"][0]["u"], "1");
    let (code, v) = padyn_json(&["linearize", "--p", "3", "--N", "20", "--K", "6"], &json!({"f": f}));
    assert_eq!(code, 0);
    assert!(v["min_valuation_profile"].is_array());
}

#[test]
fn batch_jobs_run_concurrently_in_order() {
    let dir = std::env::temp_dir().join(format!("padyn-jobs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("wideg.json");
    let jobs = json!([
        {"command": "wideg", "ctx": {"p": 3, "N": 10, "K": 12}, "inputs": {"series": {"binom": 3}},
         "output_path": out_path.to_str().unwrap()},
        {"command": "gen-pair", "ctx": {"p": 2, "N": 30, "K": 16}, "inputs": {"kind": "conjugated"}, "seed": 5},
        {"command": "torsion-check", "ctx": {"p": 2, "N": 12, "K": 12}, "inputs": {"f": {"coeffs": [2, 1]}}},
    ]);
    let path = dir.join("jobs.json");
    std::fs::write(&path, jobs.to_string()).unwrap();
    let (code, out) = padyn(&["--jobs", path.to_str().unwrap()], "");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(code, 2);
    assert_eq!(v[0]["report"], json!({"wideg": 3}));
    assert_eq!(v[1]["exit"], 0);
    assert_eq!(v[1]["report"]["provenance"]["seed"], 5);
    assert_eq!(v[2]["error"]["code"], "precision_budget");
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(saved, json!({"wideg": 3}));
    std::fs::remove_dir_all(&dir).ok();
}
