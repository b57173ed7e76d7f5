//! End-to-end CLI behaviour: exit codes, report structure, file outputs.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_polyscat")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyscat_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SCENE: &str = r#"{
    "version": 1,
    "dimension": 2,
    "scatterers": {
        "sigma": { "obstacles": [ { "vertices": [[0,0],[1,0],[1,1],[0,1]] } ] }
    },
    "waves": [ { "family": "acoustic", "omega": 2.0, "direction": [1, 0] } ],
    "plan": { "class": "general", "allowed_bcs": ["neumann"] }
}"#;

#[test]
fn certify_report_on_stdout_and_out_file() {
    let dir = tmp_dir("certify");
    let scene = dir.join("scene.json");
    let out = dir.join("report.json");
    std::fs::write(&scene, SCENE).unwrap();
    let output = Command::new(bin())
        .args(["certify", "--grid-density", "64"])
        .arg("--scene")
        .arg(&scene)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(stdout, written, "--out must mirror stdout");
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    // A single Neumann wave leaves an orthogonal witness normal.
    assert_eq!(
        report["results"]["certificate"]["verdict"]["kind"],
        "criterion_fails"
    );
    assert_eq!(report["results"]["agreement"], true);
    assert!(report["input_digest"].as_str().unwrap().starts_with("sha256:"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn certify_obstacle_flips_the_verdict() {
    let dir = tmp_dir("obstacle");
    let scene = dir.join("scene.json");
    std::fs::write(&scene, SCENE).unwrap();
    let output = Command::new(bin())
        .args(["certify-obstacle", "--grid-density", "64"])
        .arg("--scene")
        .arg(&scene)
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(
        report["results"]["certificate"]["verdict"]["kind"],
        "criterion_holds"
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn reflect_check_reports_ok() {
    let dir = tmp_dir("reflect");
    let scene = dir.join("scene.json");
    // Scene with screens: their carriers become the checked planes.
    std::fs::write(
        &scene,
        r#"{
        "version": 1,
        "dimension": 2,
        "scatterers": { "s": { "screens": [ { "segment": [[0,0],[1,0]], "bc": "neumann" } ] } },
        "waves": [ { "family": "acoustic", "omega": 15.0, "direction": [0.6, 0.8] } ],
        "plan": { "class": "general", "allowed_bcs": ["dirichlet", "neumann"] }
    }"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .args(["reflect-check", "--grid-density", "25"])
        .arg("--scene")
        .arg(&scene)
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["results"]["ok"], true);
    let checks = report["results"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2); // two conditions, one wave, one plane
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn faces_on_a_3d_scene() {
    let dir = tmp_dir("faces3d");
    let scene = dir.join("scene.json");
    std::fs::write(
        &scene,
        r#"{
        "version": 1,
        "dimension": 3,
        "scatterers": { "cube": { "obstacles": [ { "halfspaces": [
            { "normal": [1,0,0], "offset": 1.0, "side": "leq" },
            { "normal": [1,0,0], "offset": 0.0, "side": "geq" },
            { "normal": [0,1,0], "offset": 1.0, "side": "leq" },
            { "normal": [0,1,0], "offset": 0.0, "side": "geq" },
            { "normal": [0,0,1], "offset": 1.0, "side": "leq" },
            { "normal": [0,0,1], "offset": 0.0, "side": "geq" }
        ] } ] } }
    }"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .arg("faces")
        .arg("--scene")
        .arg(&scene)
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["results"]["cube"]["counts"][0], 8);
    assert_eq!(report["results"]["cube"]["counts"][1], 12);
    assert_eq!(report["results"]["cube"]["counts"][2], 6);
    assert_eq!(report["results"]["cube"]["vertex_normal_span_ok"], true);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn certify_mixed_elastic_uses_the_sampled_path() {
    let dir = tmp_dir("mixed");
    let scene = dir.join("scene.json");
    std::fs::write(
        &scene,
        r#"{
        "version": 1,
        "dimension": 3,
        "waves": [ { "family": "elastic", "omega": 3.0, "lambda": 2.0, "mu": 1.0,
                     "rho": 1.0, "direction": [1, 0, 0], "q": [0, 1, 0],
                     "c_p": [0.7071067811865476, 0], "c_s": [0, 0.7071067811865476] } ],
        "plan": { "class": "general", "allowed_bcs": ["elastic_third"] }
    }"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .args(["certify", "--grid-density", "64"])
        .arg("--scene")
        .arg(&scene)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["results"]["certificate"]["method"], "sampled");
    assert_eq!(report["results"]["agreement"], true);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exit_codes_from_the_binary() {
    let dir = tmp_dir("codes");
    // Usage error: missing --scene.
    let output = Command::new(bin()).arg("certify").output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    // Parse error: invalid JSON.
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ nope").unwrap();
    let output = Command::new(bin())
        .arg("certify")
        .arg("--scene")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty(), "diagnostics go to stderr");

    // Invariant violation: non-unit wave direction.
    let invalid = dir.join("invalid.json");
    std::fs::write(&invalid, SCENE.replace("[1, 0]", "[2, 0]")).unwrap();
    let output = Command::new(bin())
        .arg("certify")
        .arg("--scene")
        .arg(&invalid)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));

    // Computation failure: tracing identical scatterers has no flat point.
    let identical = dir.join("identical.json");
    std::fs::write(
        &identical,
        r#"{
        "version": 1,
        "dimension": 2,
        "scatterers": {
            "a": { "obstacles": [ { "vertices": [[0,0],[1,0],[1,1],[0,1]] } ] },
            "b": { "obstacles": [ { "vertices": [[0,0],[1,0],[1,1],[0,1]] } ] }
        },
        "trace": { "sigma": "a", "sigma_prime": "b" }
    }"#,
    )
    .unwrap();
    let output = Command::new(bin())
        .arg("trace")
        .arg("--scene")
        .arg(&identical)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));

    // Usage error: render without --svg.
    let good = dir.join("good.json");
    std::fs::write(&good, SCENE).unwrap();
    let output = Command::new(bin())
        .arg("render")
        .arg("--scene")
        .arg(&good)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn trace_derived_seed_between_scaled_squares() {
    let dir = tmp_dir("trace_pair");
    let scene = dir.join("scene.json");
    std::fs::write(
        &scene,
        r#"{
        "version": 1,
        "dimension": 2,
        "scatterers": {
            "sigma": { "obstacles": [ { "vertices": [[-0.5,-0.5],[0.5,-0.5],[0.5,0.5],[-0.5,0.5]] } ] },
            "sigma_prime": { "obstacles": [ { "vertices": [[-0.75,-0.75],[0.75,-0.75],[0.75,0.75],[-0.75,0.75]] } ] }
        },
        "trace": { "sigma": "sigma", "sigma_prime": "sigma_prime" }
    }"#,
    )
    .unwrap();
    let svg = dir.join("trace.svg");
    let output = Command::new(bin())
        .arg("trace")
        .arg("--scene")
        .arg(&scene)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["results"]["witness_sound"], true);
    assert_eq!(report["results"]["seed"]["kind"], "derived");
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.contains("<polygon"));
    assert!(svg_text.contains("stroke-dasharray"));
    let _ = std::fs::remove_dir_all(&dir);
}
