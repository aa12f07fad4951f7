use serde_json::Value;
use std::process::{Command, Output};

fn gbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = gbm(&all);
    let value = serde_json::from_slice(&out.stdout).expect("json output");
    (out.status.code().unwrap(), value)
}

#[test]
fn check_octahedron_with_round_measure() {
    let (code, r) = json(&["check", "s2-octahedron", "--measure", "round"]);
    assert_eq!(code, 0);
    assert_eq!(r["chi"], 2);
    assert!((r["mu"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(r["pass"], true);
}

#[test]
fn check_torus_with_infinity_line() {
    let (code, r) = json(&["check", "t2-grid", "--measure", "infinity-line"]);
    assert_eq!(code, 0);
    assert_eq!(r["chi"], 0);
    assert_eq!(r["mu"]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn atom_on_an_edge_fails_with_a_diagnostic() {
    let out = gbm(&["check", "rp2-icosahedral", "--measure", "atomic-on-edge"]);
    assert_ne!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("edge"), "{err}");
    let (code, r) = json(&["check", "rp2-icosahedral", "--measure", "atomic-on-edge"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"], "BoundaryAtom");
}

#[test]
fn example_writes_the_torus() {
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("t2-grid-4.json");
    let out = gbm(&["example", "t2-grid", "--k", "4", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["faces"]["2"].as_array().unwrap().len(), 32);
    let (code, r) = json(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["chi"], 0);
}

#[test]
fn random_simplex_residual_within_allowance() {
    let (code, r) = json(&["sgb", "--random-simplex", "--dim", "2", "--seed", "7"]);
    assert_eq!(code, 0);
    let res = r["residual"]["value"].as_f64().unwrap();
    assert!(res.abs() <= r["allowance"].as_f64().unwrap());
    let (code, r) = json(&[
        "sgb", "--random-simplex", "--dim", "3", "--seed", "7", "--measure", "round-mc", "--samples", "200000",
    ]);
    assert_eq!(code, 0);
    let sigma = r["residual"]["std_error"].as_f64().unwrap();
    assert!(sigma > 0.0);
    assert!(r["residual"]["value"].as_f64().unwrap().abs() <= 4.0 * sigma);
}

#[test]
fn round_measure_is_icosahedrally_invariant() {
    let (code, r) = json(&["invariance", "--measure", "round", "--group", "icosahedral"]);
    assert_eq!(code, 0);
    assert_eq!(r["pass"], true);
    let (code, _) = json(&["invariance", "--measure", "averaged", "--group", "octahedral", "--seed", "3"]);
    assert_eq!(code, 0);
    let (code, _) = json(&["invariance", "--measure", "atomic-random", "--group", "klein"]);
    assert_eq!(code, 1);
}

#[test]
fn json_reports_are_byte_identical() {
    let args = [
        "check", "s2-octahedron", "--measure", "round-mc", "--samples", "20000", "--seed", "5", "--format", "json",
    ];
    let runs: Vec<Vec<u8>> = ["1", "4", "4"]
        .iter()
        .map(|threads| {
            Command::new(env!("CARGO_BIN_EXE_gbm"))
                .args(args)
                .env("GBM_THREADS", threads)
                .output()
                .unwrap()
                .stdout
        })
        .collect();
    assert!(!runs[0].is_empty());
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn pullback_document() {
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("tripling.json");
    std::fs::write(
        &path,
        r#"{"degree": 3, "atoms": [{"turn": "0", "weight": "1"}],
            "upstairs": [{"turn": "0", "weight": 1}, {"turn": "1/3", "weight": 1}, {"turn": "2/3", "weight": 1}]}"#,
    )
    .unwrap();
    let (code, r) = json(&["pullback", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["pulled_total"], "3");
    assert_eq!(r["quotient"]["pass"], true);
}

#[test]
fn dichotomy_commands() {
    let (code, r) = json(&["dichotomy", "t2-grid", "--k", "3", "--measure", "fixed-point"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "consistent");
    let (code, r) = json(&["dichotomy", "rp2-icosahedral", "--measure", "round", "--orbit-depth", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["chi"], 1);
}

#[test]
fn unknown_inputs_are_errors() {
    assert_eq!(gbm(&["check", "no-such-manifold.json"]).status.code(), Some(2));
    assert_eq!(gbm(&["check", "s2-octahedron", "--measure", "bogus"]).status.code(), Some(2));
    assert_eq!(gbm(&["example", "h2-surface"]).status.code(), Some(2));
}
