use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_normvol"))
}

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("the binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn toric_quotient_minimum() {
    let out = run(&["toric", "--input", input("q3.json").to_str().unwrap(), "--minimize"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], "4/3");
    assert_eq!(v["minimizer_xi"], "(1,1)");
    assert_eq!(v["volume"], v["volume_by_triangulation"]);
    assert_eq!(v["minimizer"]["unique"], true);
}

#[test]
fn toric_at_a_given_valuation() {
    let out = run(&["toric", "--json", r#"{"cone_rays": [[1, 0], [0, 1]]}"#, "--xi", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["normalized_volume"], "9/2");
    assert_eq!(v["log_discrepancy"], "3");
    assert_eq!(v["volume"], "1/2");
}

#[test]
fn hypersurface_family_minimum() {
    let out = run(&["hyper", "--family", "A_k", "--dim", "3", "--k", "5", "--minimize"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], "27/2");
    assert_eq!(v["weight"], "(2,2,2,1)");
    let out = run(&["hyper", "--input", input("e7-dim4.json").to_str().unwrap(), "--minimize"]);
    let v = json(&out);
    assert_eq!(v["value"], "32000/243");
    assert_eq!(v["weight"], "(9,9,9,5,6)");
}

#[test]
fn hypersurface_weight_evaluation() {
    let out = run(&["hyper", "--input", input("a-surface.json").to_str().unwrap(), "--weight", "5,5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let e = &json(&out)["evaluation"];
    assert_eq!(e["normalized_volume"], "4/5");
    assert_eq!(e["weight_of_f"], "10");
    assert_eq!(e["degenerate_initial_form"], false);
}

#[test]
fn coefficients_are_accepted_with_a_warning() {
    let out = run(&[
        "hyper",
        "--json",
        r#"{"terms": [{"exponents": [2, 0, 0], "coefficient": 3}, [0, 2, 0], [0, 0, 3]], "nondegenerate": true}"#,
        "--weight",
        "3,3,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn ideal_invariants_and_graded_family() {
    let out = run(&["ideal", "--input", input("ideal-plane.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["multiplicity"], "7");
    assert_eq!(v["lct"], "1");
    let out = run(&["ideal", "--input", input("ideal-quotient.json").to_str().unwrap(), "--xi", "1,1", "--k-max", "6"]);
    let v = json(&out);
    assert_eq!(v["all_inequalities_hold"], true);
    assert_eq!(v["graded_family"].as_array().unwrap().len(), 6);
}

#[test]
fn kstab_verdicts() {
    let out = run(&["kstab", "--input", input("p2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "semistable");
    assert_eq!(v["degree"], "9");
    assert_eq!(v["phi_s_closed_form"], "0");
    assert_eq!(v["filtration"]["volume_formula"], v["filtration"]["volume_direct"]);
    let out = run(&["kstab", "--input", input("blp2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "unstable");
}

#[test]
fn invalid_json_points_at_the_field() {
    let out = run(&["toric", "--json", r#"{"cone_rays": [[1, 0], [0, "x"]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["error"], "invalid input");
    assert_eq!(e["pointer"], "/cone_rays/1/1");
    let out = run(&["kstab", "--json", r#"{"fano_fan_rays": [[1, 0], [0, 1]], "r": 1, "extra": 0}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_geometry_is_exit_two() {
    // not a Fano fan
    let out = run(&["kstab", "--json", r#"{"fano_fan_rays": [[1, 0], [0, 1]], "r": 1}"#]);
    assert_eq!(out.status.code(), Some(2));
    // xi outside the cone
    let out = run(&["toric", "--input", input("q3.json").to_str().unwrap(), "--xi", "1,-1"]);
    assert_eq!(out.status.code(), Some(2));
    // A(w) <= 0
    let out = run(&["hyper", "--json", r#"{"terms": [[2,0,0],[0,3,0],[0,0,7]], "nondegenerate": true}"#, "--weight", "21,14,6"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown example id
    let out = run(&["reproduce", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("quotient-1/3-11"));
    // missing input
    assert_eq!(run(&["toric"]).status.code(), Some(2));
    // bad flag
    assert_eq!(run(&["toric", "--tolerance", "-1", "--input", input("q3.json").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn starved_minimizer_is_exit_three() {
    // a restart whose residual lands exactly on zero would count as converged,
    // so use a single start that does not
    let octahedron = input("octahedron-cone.json");
    let args = ["toric", "--input", octahedron.to_str().unwrap(), "--minimize", "--restarts", "1", "--seed", "0"];
    let out = run(&[&args[..], &["--tolerance", "1e-300"]].concat());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["minimizer"]["converged"], false);
}

#[test]
fn output_is_deterministic() {
    let args = ["hyper", "--family", "E7", "--dim", "3", "--minimize", "--seed", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(run(&threaded).stdout, a.stdout);
}

#[test]
fn reports_round_trip_through_json() {
    let out = run(&["toric", "--input", input("octahedron-cone.json").to_str().unwrap(), "--minimize", "--pretty"]);
    let v = json(&out);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    assert_eq!(v["value"], "8");
    // floats are written in shortest round-trip form
    let f = v["minimizer"]["value"].as_f64().unwrap();
    assert_eq!(f.to_string().parse::<f64>().unwrap(), f);
}

#[test]
fn single_reproduction() {
    let out = run(&["reproduce", "quotient-1/5-12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["examples"][0]["rows"][0]["computed"], "4/5");
}
