use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use curvdim::json::parse_real;
use curvdim::{nonlinear_residual, ricci_flat, ConditionSpec, Dimension, Graph};
use serde_json::Value;

fn curvdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvdim")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("curvdim-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let path = scratch(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn generate(family: &str, params: &str) -> String {
    let out = curvdim(&["gen", "--family", family, "--params", params]);
    assert_eq!(out.status.code(), Some(0));
    write(&format!("{family}-{params}.json"), std::str::from_utf8(&out.stdout).unwrap())
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn number(v: &Value) -> f64 {
    parse_real(v).unwrap()
}

#[test]
fn gen_round_trips_through_the_library() {
    let out = curvdim(&["gen", "--family", "torus2d", "--params", "3,4"]);
    assert_eq!(out.status.code(), Some(0));
    let g = Graph::from_document(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(g, Graph::torus2d(3, 4).unwrap());
}

#[test]
fn out_flag_writes_the_report() {
    let path = scratch("petersen.json");
    let out = curvdim(&["--out", path.to_str().unwrap(), "gen", "--family", "petersen"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let g = Graph::from_document(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g, Graph::petersen());
}

#[test]
fn cd_without_kappa_reports_optimal_curvature() {
    let edge = generate("path", "2");
    let out = curvdim(&["cd", "--graph", &edge, "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for vertex in report["vertices"].as_array().unwrap() {
        assert!((number(&vertex["kappa"]) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn cd_violation_exits_one_with_a_real_witness() {
    let c5 = generate("cycle", "5");
    let out = curvdim(&["cd", "--graph", &c5, "--dim", "2", "--kappa", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["verdict"], "violated");
    let g = Graph::cycle(5).unwrap();
    let spec = ConditionSpec::cd(Dimension::new(2.0).unwrap(), 10.0).unwrap();
    for vertex in report["vertices"].as_array().unwrap() {
        let v = vertex["v"].as_u64().unwrap() as usize;
        let witness: Vec<f64> = vertex["witness"].as_array().unwrap().iter().map(number).collect();
        assert!(nonlinear_residual(&g, &spec, &witness, v).unwrap().value().unwrap() < 0.0);
    }
}

#[test]
fn cde_check_finds_a_violation() {
    let c5 = generate("cycle", "5");
    let out = curvdim(&[
        "check", "--condition", "cde", "--graph", &c5, "--dim", "2", "--kappa", "5", "--starts", "20", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["seed"], 3);
    let g = Graph::cycle(5).unwrap();
    let spec = ConditionSpec::cde(Dimension::new(2.0).unwrap(), 5.0).unwrap();
    let vertex = &report["vertices"][0];
    let witness: Vec<f64> = vertex["witness"].as_array().unwrap().iter().map(number).collect();
    assert!(nonlinear_residual(&g, &spec, &witness, 0).unwrap().value().unwrap() < 0.0);
}

#[test]
fn check_requires_psi_for_psi_conditions() {
    let c5 = generate("cycle", "5");
    let out = curvdim(&["check", "--condition", "cdpsi", "--graph", &c5, "--dim", "2", "--kappa", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--psi"));
}

#[test]
fn sqrt_log_constant_clears_the_known_lower_bound() {
    let out = curvdim(&["constant", "--psi", "sqrt", "--phi", "log"]);
    assert_eq!(out.status.code(), Some(0));
    let value = number(&json(&out)["value"]);
    assert!(value >= 0.1104, "{value}");
}

#[test]
fn ricci_flat_path_is_refuted_by_degree_mismatch() {
    let p3 = generate("path", "3");
    let out = curvdim(&["ricci-flat", "--graph", &p3]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["ricci_flat"], false);
    assert!(report["vertices"].as_array().unwrap().iter().all(|v| v["reason"] == "degree-mismatch"));
    assert!(!ricci_flat(&Graph::path(3).unwrap()).ricci_flat);
}

#[test]
fn ricci_flat_cycle_is_certified() {
    let c5 = generate("cycle", "5");
    let out = curvdim(&["ricci-flat", "--graph", &c5, "--vertex", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn identities_pass_on_the_cube() {
    let cube = generate("hypercube", "3");
    let out = curvdim(&["identities", "--graph", &cube, "--trials", "50", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn limits_report_every_vertex_and_operator() {
    let c5 = generate("cycle", "5");
    let f = write("f.json", r#"{"values": [0.3, -0.2, 0.5, 0.1, -0.4]}"#);
    let out = curvdim(&["limits", "--psi", "sqrt", "--graph", &c5, "--f", &f]);
    assert_eq!(out.status.code(), Some(0));
    let probes = json(&out)["probes"].as_array().unwrap().clone();
    assert_eq!(probes.len(), 15);
    assert!(probes.iter().all(|p| number(&p["abs_error"]) < 1e-6));
}

#[test]
fn bad_input_exits_two() {
    let broken = write("broken.json", "{");
    let out = curvdim(&["cd", "--graph", &broken, "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let loop_graph = write("loop.json", r#"{"n": 2, "edges": [[0, 0]]}"#);
    assert_eq!(curvdim(&["ricci-flat", "--graph", &loop_graph]).status.code(), Some(2));

    let c5 = generate("cycle", "5");
    assert_eq!(curvdim(&["cd", "--graph", &c5, "--dim", "2", "--vertex", "7"]).status.code(), Some(2));
    assert_eq!(curvdim(&["cd", "--graph", &c5, "--dim", "-1"]).status.code(), Some(2));
    assert_eq!(curvdim(&["constant", "--psi", "exp", "--phi", "log"]).status.code(), Some(2));
}
