use std::process::{Command, Output};

use serde_json::Value;

fn noether(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noether")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(args: &[&str]) -> (Value, String) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = noether(&full);
    assert_eq!(code(&o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    (serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn worked_example_succeeds_and_round_trips() {
    let (v, text) = json(&["analyze", "--a", "1/2,1/2,1/3,1/5,7/15", "--no-sampling"]);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text.trim_end());
    assert_eq!(v["nef"]["nef"], Value::Bool(false));
    assert!(v["unsupported"].is_null());
    assert_eq!(v["input"]["d"], 4);
}

#[test]
fn text_output_names_the_dynamical_degree() {
    let o = noether(&["analyze", "--a", "1/2,1/2,1/3,1/5,7/15", "--no-sampling", "--precision", "12"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("dynamical degree: 3.56155281280"), "{out}");
}

#[test]
fn no_singular_orbits_gives_degree_d() {
    let (v, _) = json(&["analyze", "--a", "2/5,2/5,2/5,2/5,2/5", "--no-sampling"]);
    assert_eq!(v["nef"]["nef"], Value::Bool(true));
    let out = String::from_utf8(noether(&["analyze", "--a", "2/5,2/5,2/5,2/5,2/5", "--no-sampling"]).stdout).unwrap();
    assert!(out.contains("dynamical degree: 4.000"), "{out}");
}

#[test]
fn invalid_input_exits_one() {
    assert_eq!(code(&noether(&["analyze", "--a", "1/2,1/2"])), 1);
    assert_eq!(code(&noether(&["analyze", "--a", "1/2,1/2,x,1"])), 1);
    assert_eq!(code(&noether(&["analyze", "--a", "1/2,1/2,1/2,1/4"])), 1);
    assert_eq!(code(&noether(&["frobnicate"])), 1);
    assert_eq!(code(&noether(&["grid-verify", "--d-max", "2"])), 1);
}

#[test]
fn non_expanding_configuration_exits_two() {
    let o = noether(&["analyze", "--a", "1/2,1/2,1/2,1/2", "--no-sampling"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&noether(&["--help"])), 0);
}

#[test]
fn fixtures_report_their_checks() {
    let (v, text) = json(&["fixtures", "p3cubic"]);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text.trim_end());
    assert_eq!(v["checks"]["charpoly_matches"], Value::Bool(true));
    assert_eq!(v["checks"]["class_identity_holds"], Value::Bool(true));

    let (v, _) = json(&["fixtures", "blowup-invariant", "--lambda", "3"]);
    assert_eq!(v["jordan_index"], 1);
    assert_eq!(v["flags"]["e_nef"], Value::Bool(false));

    let (v, _) = json(&["fixtures", "y-model"]);
    assert_eq!(v["charpoly_is_x_times_chi"], Value::Bool(true));
    assert_eq!(v["lambda_is_one_plus_sqrt2"], Value::Bool(true));
}

#[test]
fn small_grid_passes() {
    let (v, text) = json(&["grid-verify", "--d-max", "3", "--n-max", "2"]);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text.trim_end());
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["status"] != "Fail"));
}

#[test]
fn orbits_and_cesaro_run() {
    let o = noether(&["orbits", "--a", "1/2,1/2,1/3,1/5,7/15"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("singular, N = 2"));
    let (v, _) = json(&["cesaro", "--fixture", "p3cubic", "--N-max", "200"]);
    assert!(v["errors"].as_array().unwrap().len() >= 4);
}

#[test]
fn star_is_reproducible_for_a_seed() {
    let args = ["star", "--a", "1/2,1/2,1/3,1/5,7/15", "--samples", "2000", "--n-max", "4", "--seed", "7"];
    let (a, ta) = json(&args);
    let (_, tb) = json(&args);
    assert_eq!(ta, tb);
    assert!(a["gate"].is_object());
}
