//! C ABI over the polyscat command surface.
//!
//! Scenes are parsed once into an opaque handle; every command produces the
//! same canonical JSON report as the CLI. Strings returned through out
//! parameters are owned by the library and must be released with
//! [`ps_string_free`]. Errors return a status code; the message for the most
//! recent failure on the current thread is available via [`ps_last_error`].

use polyscat::run::{run, Command, RunError, RunFlags};
use polyscat::scene::{parse_scene, SceneError};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes mirroring the CLI exit-code contract.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    PsOk = 0,
    PsUsage = 1,
    PsParse = 2,
    PsInvariant = 3,
    PsCompute = 4,
    PsNullArgument = 5,
    PsInvalidUtf8 = 6,
}

/// An opaque, validated scene.
pub struct PsScene {
    text: String,
}

/// Run options; zero or negative numeric fields select the documented
/// defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PsRunOptions {
    pub seed: u64,
    /// Sphere-grid density per great circle; 0 selects 256.
    pub grid_density: u32,
    /// Trace iteration cap; 0 selects 32.
    pub max_iters: u32,
    /// Trace fill resolution; <= 0 selects the scene-adapted default.
    pub resolution: f64,
    /// Vanishing-threshold override; <= 0 keeps 1e-9.
    pub tolerance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn scene_status(err: &SceneError) -> PsStatus {
    match err {
        SceneError::Parse(_) => PsStatus::PsParse,
        _ => PsStatus::PsInvariant,
    }
}

fn run_status(err: &RunError) -> PsStatus {
    match err.exit_code() {
        1 => PsStatus::PsUsage,
        2 => PsStatus::PsParse,
        3 => PsStatus::PsInvariant,
        _ => PsStatus::PsCompute,
    }
}

/// Message of the most recent error on this thread; empty when none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Default run options.
#[no_mangle]
pub extern "C" fn ps_run_options_default() -> PsRunOptions {
    PsRunOptions {
        seed: 0,
        grid_density: 256,
        max_iters: 32,
        resolution: 0.0,
        tolerance: 0.0,
    }
}

/// Parses and validates a scene from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string valid for the duration of the
/// call; `out_scene` must be a valid pointer. On success the handle must be
/// released with [`ps_scene_free`].
#[no_mangle]
pub unsafe extern "C" fn ps_scene_parse(
    json: *const c_char,
    out_scene: *mut *mut PsScene,
) -> PsStatus {
    if json.is_null() || out_scene.is_null() {
        set_error("null argument");
        return PsStatus::PsNullArgument;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        set_error("scene text is not valid UTF-8");
        return PsStatus::PsInvalidUtf8;
    };
    match catch_unwind(AssertUnwindSafe(|| parse_scene(text))) {
        Ok(Ok(_)) => {
            let handle = Box::new(PsScene { text: text.to_string() });
            *out_scene = Box::into_raw(handle);
            PsStatus::PsOk
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            *out_scene = std::ptr::null_mut();
            scene_status(&e)
        }
        Err(_) => {
            set_error("internal panic");
            *out_scene = std::ptr::null_mut();
            PsStatus::PsCompute
        }
    }
}

/// Releases a scene handle; NULL is a no-op.
///
/// # Safety
/// `scene` must be a pointer returned by [`ps_scene_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_scene_free(scene: *mut PsScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

fn command_from(name: &str) -> Option<Command> {
    Some(match name {
        "certify" => Command::Certify,
        "certify-obstacle" => Command::CertifyObstacle,
        "reflect-check" => Command::ReflectCheck,
        "group" => Command::Group,
        "trace" => Command::Trace,
        "faces" => Command::Faces,
        "render" => Command::Render,
        _ => return None,
    })
}

fn to_c_string(text: &str) -> *mut c_char {
    CString::new(text.replace('\0', ""))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Runs one command against a parsed scene. The canonical report JSON is
/// returned through `out_report_json`; commands that produce an SVG (trace,
/// render) also fill `out_svg` when it is non-NULL. Both strings are released
/// with [`ps_string_free`].
///
/// # Safety
/// `scene` must be a live handle from [`ps_scene_parse`]; `command` a
/// NUL-terminated string; `out_report_json` a valid pointer; `options` and
/// `out_svg` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ps_run(
    scene: *const PsScene,
    command: *const c_char,
    options: *const PsRunOptions,
    out_report_json: *mut *mut c_char,
    out_svg: *mut *mut c_char,
) -> PsStatus {
    if scene.is_null() || command.is_null() || out_report_json.is_null() {
        set_error("null argument");
        return PsStatus::PsNullArgument;
    }
    *out_report_json = std::ptr::null_mut();
    if !out_svg.is_null() {
        *out_svg = std::ptr::null_mut();
    }
    let Ok(command_name) = CStr::from_ptr(command).to_str() else {
        set_error("command is not valid UTF-8");
        return PsStatus::PsInvalidUtf8;
    };
    let Some(cmd) = command_from(command_name) else {
        set_error(&format!(
            "unknown command `{command_name}` (certify | certify-obstacle | reflect-check | group | trace | faces | render)"
        ));
        return PsStatus::PsUsage;
    };
    let opts = if options.is_null() {
        ps_run_options_default()
    } else {
        *options
    };
    let flags = RunFlags {
        seed: opts.seed,
        grid_density: if opts.grid_density == 0 { 256 } else { opts.grid_density as usize },
        max_iters: if opts.max_iters == 0 { 32 } else { opts.max_iters as usize },
        resolution: (opts.resolution > 0.0).then_some(opts.resolution),
        tolerance: (opts.tolerance > 0.0).then_some(opts.tolerance),
    };
    let text = &(*scene).text;
    let outcome = catch_unwind(AssertUnwindSafe(|| run(cmd, text, &flags)));
    match outcome {
        Ok(Ok(output)) => {
            *out_report_json = to_c_string(&output.report.to_canonical_json());
            if !out_svg.is_null() {
                if let Some(svg) = &output.svg {
                    *out_svg = to_c_string(svg);
                }
            }
            PsStatus::PsOk
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            run_status(&e)
        }
        Err(_) => {
            set_error("internal panic");
            PsStatus::PsCompute
        }
    }
}

/// Releases a string returned by this library; NULL is a no-op.
///
/// # Safety
/// `text` must originate from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
