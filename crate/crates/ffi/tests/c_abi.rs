use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use spectator_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { spectator_string_free(s) };
    out
}

fn last_error() -> String {
    take(spectator_last_error())
}

#[test]
fn fixture_round_trip() {
    let name = CString::new("flux-off").unwrap();
    let mut sc = ptr::null_mut();
    assert_eq!(
        unsafe { spectator_scenario_load(name.as_ptr(), &mut sc) },
        SpectatorStatus::Ok
    );
    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { spectator_scenario_run(sc, false, 3, 0, &mut report) },
        SpectatorStatus::Ok
    );

    let key = CString::new("angular_momentum.zero_point").unwrap();
    let mut value = ptr::null_mut();
    assert_eq!(
        unsafe { spectator_report_quantity(report, key.as_ptr(), &mut value) },
        SpectatorStatus::Ok
    );
    assert_eq!(take(value), "hbar/2");

    let json: serde_json::Value =
        serde_json::from_str(&take(unsafe { spectator_report_json(report) })).unwrap();
    assert_eq!(json["scenario"], "flux-off");
    assert!(take(unsafe { spectator_report_text(report) }).contains("flux-off"));

    let (mut total, mut passed) = (0usize, 0usize);
    assert_eq!(
        unsafe { spectator_report_goldens(report, &mut total, &mut passed) },
        SpectatorStatus::Ok
    );
    // The numeric golden is missing without the numeric stage.
    assert_eq!(passed + 1, total);

    let missing = CString::new("no.such.quantity").unwrap();
    assert_eq!(
        unsafe { spectator_report_quantity(report, missing.as_ptr(), &mut value) },
        SpectatorStatus::NotFound
    );
    assert!(last_error().contains("no.such.quantity"));
    unsafe {
        spectator_report_free(report);
        spectator_scenario_free(sc);
    }
}

#[test]
fn errors_are_reported() {
    let mut sc = ptr::null_mut();
    assert_eq!(
        unsafe { spectator_scenario_load(ptr::null(), &mut sc) },
        SpectatorStatus::NullPointer
    );
    let bad = CString::new("name = 1").unwrap();
    assert_eq!(
        unsafe { spectator_scenario_from_toml(bad.as_ptr(), &mut sc) },
        SpectatorStatus::Scenario
    );
    assert!(last_error().contains("invalid scenario"));
    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { spectator_scenario_load(invalid.as_ptr().cast(), &mut sc) },
        SpectatorStatus::InvalidUtf8
    );
    let mut levels = [0.0; 2];
    assert_eq!(
        unsafe { spectator_radial_spectrum(0.0, 1.0, 0.5, 0, 50, 2, 1e-5, levels.as_mut_ptr()) },
        SpectatorStatus::Numeric
    );
    let mut f = 0.0;
    assert_eq!(
        unsafe {
            spectator_secular_frequency(0.7, 1.0, 5.0, 1.0, 1.0, 1e4, &mut f, ptr::null_mut())
        },
        SpectatorStatus::Numeric
    );
    // Null handles are tolerated by the destructors.
    unsafe {
        spectator_scenario_free(ptr::null_mut());
        spectator_report_free(ptr::null_mut());
        spectator_string_free(ptr::null_mut());
    }
}

#[test]
fn numeric_entry_points() {
    let mut num = [0.0; 3];
    let mut exact = [0.0; 3];
    unsafe {
        assert_eq!(
            spectator_radial_spectrum(0.0, 1.0, 0.5, 1, 1000, 3, 1e-5, num.as_mut_ptr()),
            SpectatorStatus::Ok
        );
        assert_eq!(
            spectator_fock_darwin(0.0, 1.0, 0.5, 1, 3, exact.as_mut_ptr()),
            SpectatorStatus::Ok
        );
    }
    for (a, b) in num.iter().zip(&exact) {
        assert!((a - b).abs() / b < 1e-6);
    }
    let (mut f, mut eff) = (0.0, 0.0);
    let ratio = 50.0;
    let duration = 400.0 * 2.0 * std::f64::consts::PI * 4.0 * ratio;
    let status = unsafe {
        spectator_secular_frequency(
            1.0 / 2f64.sqrt(),
            1.0,
            ratio,
            1.0,
            1.0,
            duration,
            &mut f,
            &mut eff,
        )
    };
    assert_eq!(status, SpectatorStatus::Ok);
    assert!((f - eff).abs() / eff < 0.02);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(spectator_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn static_library() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    let profile = deps.parent()?;
    let direct = profile.join("libspectator_ffi.a");
    if direct.exists() {
        return Some(direct);
    }
    std::fs::read_dir(deps)
        .ok()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let n = p.file_name().unwrap().to_string_lossy();
            n.starts_with("libspectator_ffi") && n.ends_with(".a")
        })
        .max_by_key(|p| p.metadata().and_then(|m| m.modified()).ok())
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "spectator.h"

int main(void) {
    SpectatorScenario *sc = NULL;
    if (spectator_scenario_load("combined-trap-with-flux", &sc) != SPECTATOR_STATUS_OK) return 10;
    SpectatorReport *r = NULL;
    if (spectator_scenario_run(sc, false, 2, 0, &r) != SPECTATOR_STATUS_OK) return 11;
    char *zp = NULL;
    if (spectator_report_quantity(r, "angular_momentum.zero_point", &zp) != SPECTATOR_STATUS_OK) return 12;
    printf("%s\n", zp);
    spectator_string_free(zp);
    spectator_report_free(r);
    spectator_scenario_free(sc);

    if (spectator_scenario_load("missing-fixture.toml", &sc) != SPECTATOR_STATUS_SCENARIO) return 13;
    char *err = spectator_last_error();
    if (err == NULL || strstr(err, "missing-fixture.toml") == NULL) return 14;
    spectator_string_free(err);

    double levels[2];
    if (spectator_fock_darwin(0.0, 1.0, 0.5, 0, 2, levels) != SPECTATOR_STATUS_OK) return 15;
    printf("%.6f %.6f\n", levels[0], levels[1]);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let Some(lib) = static_library() else {
        eprintln!("static library not found, skipping");
        return;
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let out = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let text = String::from_utf8_lossy(&run.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("hbar/2 + q*Phi0/(2*c*pi)"));
    // omega_bar = sqrt(0.5), omega_c = 1, m = 0: levels 2 n omega_bar + omega_bar.
    let w = 0.5f64.sqrt();
    assert_eq!(lines.next().unwrap(), format!("{:.6} {:.6}", w, 3.0 * w));
}
