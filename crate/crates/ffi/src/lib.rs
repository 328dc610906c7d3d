//! C ABI over the spectator engine.
//!
//! Every fallible call returns a [`SpectatorStatus`]; on failure the message
//! is kept per thread and read with [`spectator_last_error`]. Strings handed
//! out by this library are owned by the caller and released with
//! [`spectator_string_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spectator::numeric::{self, NumericScenario, RadialGrid, SecularOptions};
use spectator::pipeline::{run_scenario, Options};
use spectator::report::Report;
use spectator::scenario::Scenario;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectatorStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Scenario = 3,
    Numeric = 4,
    InvalidArgument = 5,
    NotFound = 6,
    Panic = 7,
}

/// Loaded scenario. Opaque to C.
pub struct SpectatorScenario(Scenario);

/// Pipeline report. Opaque to C.
pub struct SpectatorReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: SpectatorStatus, msg: impl Into<String>) -> SpectatorStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SpectatorStatus) -> SpectatorStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(SpectatorStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, SpectatorStatus> {
    if p.is_null() {
        return Err(fail(SpectatorStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SpectatorStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn spectator_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Free with
/// [`spectator_string_free`].
#[no_mangle]
pub extern "C" fn spectator_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |s| s.clone().into_raw())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spectator_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a built-in fixture by name or a scenario file by path.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spectator_scenario_load(
    spec: *const c_char,
    out: *mut *mut SpectatorScenario,
) -> SpectatorStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpectatorStatus::NullPointer, "null output pointer");
        }
        let spec = match read_str(spec) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match Scenario::load(spec) {
            Ok(sc) => {
                *out = Box::into_raw(Box::new(SpectatorScenario(sc)));
                SpectatorStatus::Ok
            }
            Err(e) => fail(SpectatorStatus::Scenario, e.to_string()),
        }
    })
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spectator_scenario_from_toml(
    text: *const c_char,
    out: *mut *mut SpectatorScenario,
) -> SpectatorStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpectatorStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match Scenario::from_toml(text) {
            Ok(sc) => {
                *out = Box::into_raw(Box::new(SpectatorScenario(sc)));
                SpectatorStatus::Ok
            }
            Err(e) => fail(SpectatorStatus::Scenario, e.to_string()),
        }
    })
}

/// # Safety
/// `sc` must be NULL or a handle from a scenario constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spectator_scenario_free(sc: *mut SpectatorScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Runs the pipeline. `numeric` enables the numeric cross-checks; `grid` of 0
/// keeps the scenario's grid.
///
/// # Safety
/// `sc` must be a live scenario handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spectator_scenario_run(
    sc: *const SpectatorScenario,
    numeric: bool,
    n_max: usize,
    grid: usize,
    out: *mut *mut SpectatorReport,
) -> SpectatorStatus {
    guard(|| {
        if sc.is_null() || out.is_null() {
            return fail(
                SpectatorStatus::NullPointer,
                "null scenario or output pointer",
            );
        }
        let opts = Options {
            n_max,
            grid: (grid > 0).then_some(grid),
            numeric,
            ..Options::default()
        };
        match run_scenario(&(*sc).0, &opts) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(SpectatorReport(r)));
                SpectatorStatus::Ok
            }
            Err(e) => fail(SpectatorStatus::Scenario, e.to_string()),
        }
    })
}

/// # Safety
/// `r` must be NULL or a handle from [`spectator_scenario_run`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spectator_report_free(r: *mut SpectatorReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// JSON form of the report. Free with [`spectator_string_free`].
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn spectator_report_json(r: *const SpectatorReport) -> *mut c_char {
    if r.is_null() {
        set_error("null report");
        return ptr::null_mut();
    }
    into_c((*r).0.to_json())
}

/// Human-readable report text. Free with [`spectator_string_free`].
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn spectator_report_text(r: *const SpectatorReport) -> *mut c_char {
    if r.is_null() {
        set_error("null report");
        return ptr::null_mut();
    }
    into_c((*r).0.to_text())
}

/// Text of one named quantity, e.g. `"angular_momentum.zero_point"`.
///
/// # Safety
/// `r` must be a live report handle, `name` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spectator_report_quantity(
    r: *const SpectatorReport,
    name: *const c_char,
    out: *mut *mut c_char,
) -> SpectatorStatus {
    guard(|| {
        if r.is_null() || out.is_null() {
            return fail(
                SpectatorStatus::NullPointer,
                "null report or output pointer",
            );
        }
        let name = match read_str(name) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match (*r).0.quantity(name) {
            Some(q) => {
                *out = into_c(q.text());
                SpectatorStatus::Ok
            }
            None => fail(SpectatorStatus::NotFound, format!("no quantity `{name}`")),
        }
    })
}

/// Number of golden checks and how many passed.
///
/// # Safety
/// `r` must be a live report handle; `total` and `passed` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn spectator_report_goldens(
    r: *const SpectatorReport,
    total: *mut usize,
    passed: *mut usize,
) -> SpectatorStatus {
    if r.is_null() {
        return fail(SpectatorStatus::NullPointer, "null report");
    }
    let g = &(*r).0.goldens;
    if !total.is_null() {
        *total = g.len();
    }
    if !passed.is_null() {
        *passed = g.iter().filter(|g| g.passed).count();
    }
    SpectatorStatus::Ok
}

fn scenario(alpha: f64, omega_c: f64, omega_p: f64) -> NumericScenario {
    NumericScenario {
        alpha,
        omega_c,
        omega_p,
    }
}

/// Lowest `k` radial levels of sector `m` (units hbar = mu = q = c = 1) on an
/// automatic grid of `n_points`, written to `levels[0..k]`.
///
/// # Safety
/// `levels` must point to `k` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn spectator_radial_spectrum(
    alpha: f64,
    omega_c: f64,
    omega_p: f64,
    m: i64,
    n_points: usize,
    k: usize,
    tolerance: f64,
    levels: *mut f64,
) -> SpectatorStatus {
    guard(|| {
        if levels.is_null() {
            return fail(SpectatorStatus::NullPointer, "null levels buffer");
        }
        let s = scenario(alpha, omega_c, omega_p);
        if let Err(e) = s.validate() {
            return fail(SpectatorStatus::Numeric, e.to_string());
        }
        let grid = RadialGrid::auto(&s, n_points);
        match numeric::radial_spectrum(&s, m, &grid, k, tolerance) {
            Ok(sp) => {
                std::slice::from_raw_parts_mut(levels, k).copy_from_slice(&sp.levels[..k]);
                SpectatorStatus::Ok
            }
            Err(e) => fail(SpectatorStatus::Numeric, e.to_string()),
        }
    })
}

/// Closed-form levels for the same sector, written to `levels[0..k]`.
///
/// # Safety
/// `levels` must point to `k` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn spectator_fock_darwin(
    alpha: f64,
    omega_c: f64,
    omega_p: f64,
    m: i64,
    k: usize,
    levels: *mut f64,
) -> SpectatorStatus {
    guard(|| {
        if levels.is_null() {
            return fail(SpectatorStatus::NullPointer, "null levels buffer");
        }
        let s = scenario(alpha, omega_c, omega_p);
        if let Err(e) = s.validate() {
            return fail(SpectatorStatus::Numeric, e.to_string());
        }
        let fd = numeric::fock_darwin(&s, m, k);
        std::slice::from_raw_parts_mut(levels, k).copy_from_slice(&fd);
        SpectatorStatus::Ok
    })
}

/// Secular frequency of the radial Paul motion with default integration
/// settings. `effective` receives `Omega^2/(4 drive)` when not NULL.
///
/// # Safety
/// `frequency` must be writable; `effective` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn spectator_secular_frequency(
    v_amp: f64,
    d: f64,
    drive: f64,
    mu: f64,
    charge: f64,
    duration: f64,
    frequency: *mut f64,
    effective: *mut f64,
) -> SpectatorStatus {
    guard(|| {
        if frequency.is_null() {
            return fail(SpectatorStatus::NullPointer, "null output pointer");
        }
        if !duration.is_finite() {
            return fail(SpectatorStatus::InvalidArgument, "duration must be finite");
        }
        match numeric::secular_frequency(
            v_amp,
            d,
            drive,
            mu,
            charge,
            duration,
            SecularOptions::default(),
        ) {
            Ok(r) => {
                *frequency = r.frequency;
                if !effective.is_null() {
                    *effective = r.effective;
                }
                SpectatorStatus::Ok
            }
            Err(e) => fail(SpectatorStatus::Numeric, e.to_string()),
        }
    })
}
