//! Exercises the C ABI through the exported symbols, the way a foreign
//! caller would.

use polyscat_ffi::{
    ps_last_error, ps_run, ps_run_options_default, ps_scene_free, ps_scene_parse, ps_string_free,
    PsScene, PsStatus,
};
use std::ffi::{CStr, CString};

const SCENE: &str = r#"{
    "version": 1,
    "dimension": 2,
    "scatterers": {
        "sigma": { "obstacles": [ { "vertices": [[0,0],[1,0],[1,1],[0,1]] } ] }
    },
    "waves": [ { "family": "acoustic", "omega": 1.0, "direction": [1, 0] } ],
    "plan": { "class": "general", "allowed_bcs": ["dirichlet"] }
}"#;

fn parse(scene: &str) -> (*mut PsScene, PsStatus) {
    let text = CString::new(scene).unwrap();
    let mut handle: *mut PsScene = std::ptr::null_mut();
    let status = unsafe { ps_scene_parse(text.as_ptr(), &mut handle) };
    (handle, status)
}

#[test]
fn parse_run_certify_and_free() {
    let (handle, status) = parse(SCENE);
    assert_eq!(status, PsStatus::PsOk);
    assert!(!handle.is_null());

    let command = CString::new("certify").unwrap();
    let mut opts = ps_run_options_default();
    opts.grid_density = 64;
    let mut report: *mut std::ffi::c_char = std::ptr::null_mut();
    let status = unsafe {
        ps_run(handle, command.as_ptr(), &opts, &mut report, std::ptr::null_mut())
    };
    assert_eq!(status, PsStatus::PsOk);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
    unsafe { ps_string_free(report) };
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["command"], "certify");
    assert_eq!(
        value["results"]["certificate"]["verdict"]["kind"],
        "criterion_holds"
    );
    assert_eq!(value["results"]["certificate"]["verdict"]["margin"], 1.0);

    unsafe { ps_scene_free(handle) };
}

#[test]
fn render_returns_svg() {
    let (handle, status) = parse(SCENE);
    assert_eq!(status, PsStatus::PsOk);
    let command = CString::new("render").unwrap();
    let mut report: *mut std::ffi::c_char = std::ptr::null_mut();
    let mut svg: *mut std::ffi::c_char = std::ptr::null_mut();
    let status = unsafe { ps_run(handle, command.as_ptr(), std::ptr::null(), &mut report, &mut svg) };
    assert_eq!(status, PsStatus::PsOk);
    assert!(!svg.is_null());
    let svg_text = unsafe { CStr::from_ptr(svg) }.to_str().unwrap().to_string();
    assert!(svg_text.starts_with("<svg"));
    unsafe {
        ps_string_free(report);
        ps_string_free(svg);
        ps_scene_free(handle);
    }
}

#[test]
fn status_codes_and_last_error() {
    // Syntax error -> parse status.
    let (handle, status) = parse("{ not json");
    assert_eq!(status, PsStatus::PsParse);
    assert!(handle.is_null());
    let msg = unsafe { CStr::from_ptr(ps_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());

    // Invariant violation -> invariant status.
    let bad = SCENE.replace("[1, 0]", "[2, 0]");
    let (handle, status) = parse(&bad);
    assert_eq!(status, PsStatus::PsInvariant);
    assert!(handle.is_null());

    // Unknown command -> usage status.
    let (handle, status) = parse(SCENE);
    assert_eq!(status, PsStatus::PsOk);
    let command = CString::new("frobnicate").unwrap();
    let mut report: *mut std::ffi::c_char = std::ptr::null_mut();
    let status = unsafe {
        ps_run(handle, command.as_ptr(), std::ptr::null(), &mut report, std::ptr::null_mut())
    };
    assert_eq!(status, PsStatus::PsUsage);
    assert!(report.is_null());

    // Null arguments are rejected, not dereferenced.
    let status = unsafe {
        ps_run(handle, std::ptr::null(), std::ptr::null(), &mut report, std::ptr::null_mut())
    };
    assert_eq!(status, PsStatus::PsNullArgument);
    unsafe { ps_scene_free(handle) };
}

#[test]
fn generated_header_exists_and_declares_the_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("polyscat.h");
    let text = std::fs::read_to_string(&header).expect("cbindgen header must exist after build");
    for symbol in [
        "ps_scene_parse",
        "ps_scene_free",
        "ps_run",
        "ps_string_free",
        "ps_last_error",
        "ps_run_options_default",
        "PsStatus",
        "PsRunOptions",
    ] {
        assert!(text.contains(symbol), "header misses {symbol}");
    }
}
