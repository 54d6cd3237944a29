use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use retfields_ffi::*;

fn load(json: &str) -> *mut RfTrajectory {
    let c = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { rf_trajectory_from_json(c.as_ptr(), &mut out) };
    assert_eq!(status, RfStatus::Ok, "{}", last_error());
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rf_last_error_message()) }.to_string_lossy().into_owned()
}

fn v(x: f64, y: f64, z: f64) -> RfVec3 {
    RfVec3 { x, y, z }
}

#[test]
fn retarded_time_and_fields_through_the_abi() {
    let traj = load(r#"{"kind": "uniform", "velocity": [0, 0, 0.5]}"#);
    let mut r = RfRetarded::default();
    assert_eq!(unsafe { rf_retarded_time(traj, v(1.0, 0.0, 0.0), 0.0, 1e-12, &mut r) }, RfStatus::Ok);
    assert!((r.tau + 2.0 / 3f64.sqrt()).abs() <= 1e-12);
    assert!(r.certified_error <= 1e-12);

    let mut f = RfFundamental::default();
    assert_eq!(unsafe { rf_fundamental_fields(traj, v(1.0, 0.0, 0.0), 0.0, 1e-12, &mut f) }, RfStatus::Ok);
    assert!((f.z - 4.0 / 3.0).abs() <= 1e-12);

    let mut e = [RfEmFields::default(); 3];
    for (k, m) in [RfFormulation::Feynman, RfFormulation::Explicit, RfFormulation::Potentials].into_iter().enumerate() {
        assert_eq!(unsafe { rf_em_fields(traj, v(1.0, 0.5, 0.2), 0.3, 1e-12, m, &mut e[k]) }, RfStatus::Ok);
    }
    for k in 1..3 {
        assert!((e[k].e_field.x - e[0].e_field.x).abs() <= 1e-12);
        assert!((e[k].b_field.y - e[0].b_field.y).abs() <= 1e-12);
    }
    unsafe { rf_trajectory_free(traj) };
}

#[test]
fn errors_carry_status_and_message() {
    let bad = CString::new(r#"{"kind": "circular", "radius": 1.0}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rf_trajectory_from_json(bad.as_ptr(), &mut out) }, RfStatus::Config);
    assert!(out.is_null());
    assert!(last_error().contains("omega"), "{}", last_error());

    let fast = load(r#"{"kind": "uniform", "velocity": [1.2, 0, 0]}"#);
    let mut adm = RfAdmissibility::default();
    assert_eq!(unsafe { rf_trajectory_check_admissible(fast, 0.0, &mut adm) }, RfStatus::Ok);
    assert!(!adm.admissible);
    let mut r = RfRetarded::default();
    assert_eq!(unsafe { rf_retarded_time(fast, v(5.0, 0.0, 0.0), 0.0, 1e-12, &mut r) }, RfStatus::NotAdmissible);
    unsafe { rf_trajectory_free(fast) };
    let neg = CString::new(r#"{"kind": "circular", "radius": -1.0, "omega": 0.5}"#).unwrap();
    assert_eq!(unsafe { rf_trajectory_from_json(neg.as_ptr(), &mut out) }, RfStatus::InvalidTrajectory);

    let traj = load(r#"{"kind": "static"}"#);
    let mut f = RfFundamental::default();
    assert_eq!(unsafe { rf_fundamental_fields(traj, v(0.0, 0.0, 0.0), 1.0, 1e-12, &mut f) }, RfStatus::OutsideG);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { rf_fundamental_fields(traj, v(1.0, 0.0, 0.0), 1.0, 1e-12, &mut f) }, RfStatus::Ok);
    assert!(last_error().is_empty());
    assert_eq!(unsafe { rf_trajectory_from_json(ptr::null(), &mut out) }, RfStatus::NullPointer);
    unsafe { rf_trajectory_free(traj) };
    unsafe { rf_trajectory_free(ptr::null_mut()) };
}

#[test]
fn batch_reports_per_event_status() {
    let traj = load(r#"{"kind": "static"}"#);
    let events = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0];
    let mut out = [RfEmFields::default(); 3];
    let mut statuses = [RfStatus::Panic; 3];
    let s = unsafe {
        rf_em_fields_batch(traj, events.as_ptr(), 3, 1e-12, RfFormulation::Explicit, out.as_mut_ptr(), statuses.as_mut_ptr())
    };
    assert_eq!(s, RfStatus::OutsideG);
    assert_eq!(statuses, [RfStatus::Ok, RfStatus::OutsideG, RfStatus::Ok]);
    assert_eq!(out[0].e_field.x, 1.0);
    assert_eq!(out[1], RfEmFields::default());
    assert_eq!(out[2].e_field.y, 0.25);
    assert!(last_error().starts_with("event 1"));
    unsafe { rf_trajectory_free(traj) };
}

#[test]
fn kinematics_bounds_proper_time_and_json() {
    let traj = load(r#"{"kind": "circular", "radius": 1.0, "omega": 0.5}"#);
    let (mut p, mut a) = (RfVec3::default(), RfVec3::default());
    assert_eq!(unsafe { rf_trajectory_eval(traj, 0.0, &mut p, ptr::null_mut(), &mut a) }, RfStatus::Ok);
    assert!((p.x - 1.0).abs() < 1e-15 && (a.x + 0.25).abs() < 1e-15);

    let mut adm = RfAdmissibility::default();
    assert_eq!(unsafe { rf_trajectory_check_admissible(traj, 5.0, &mut adm) }, RfStatus::Ok);
    assert!(adm.admissible && (adm.speed_bound - 0.5).abs() < 1e-12);

    let mut tau = 0.0;
    assert_eq!(unsafe { rf_trajectory_proper_time(traj, 0.0, 2.0, &mut tau) }, RfStatus::Ok);
    assert!((tau - 2.0 * 0.75f64.sqrt()).abs() < 1e-10);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { rf_trajectory_to_json(traj, &mut text) }, RfStatus::Ok);
    let json = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    unsafe { rf_string_free(text) };
    let again = load(&json);
    unsafe {
        rf_trajectory_free(again);
        rf_trajectory_free(traj);
    }
}

#[test]
fn boost_static_charge() {
    let traj = load(r#"{"kind": "static"}"#);
    let mut boosted = ptr::null_mut();
    let mut err = f64::NAN;
    let s = unsafe { rf_trajectory_boost(traj, 0.5, v(0.0, 0.0, 1.0), -5.0, 5.0, 11, &mut boosted, &mut err) };
    assert_eq!(s, RfStatus::Ok, "{}", last_error());
    assert!(err <= 1e-12);
    let mut vel = RfVec3::default();
    assert_eq!(unsafe { rf_trajectory_eval(boosted, 1.0, ptr::null_mut(), &mut vel, ptr::null_mut()) }, RfStatus::Ok);
    assert!((vel.z + 0.5).abs() < 1e-12);
    let s = unsafe { rf_trajectory_boost(traj, 1.0, v(0.0, 0.0, 1.0), -5.0, 5.0, 11, &mut boosted, ptr::null_mut()) };
    assert_eq!(s, RfStatus::InvalidArgument);
    unsafe {
        rf_trajectory_free(boosted);
        rf_trajectory_free(traj);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/retfields.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "rf_trajectory_from_json",
        "rf_trajectory_free",
        "rf_trajectory_to_json",
        "rf_string_free",
        "rf_trajectory_eval",
        "rf_trajectory_check_admissible",
        "rf_trajectory_proper_time",
        "rf_trajectory_boost",
        "rf_retarded_time",
        "rf_fundamental_fields",
        "rf_em_fields",
        "rf_em_fields_batch",
        "rf_last_error_message",
        "rf_version",
        "typedef struct RfTrajectory RfTrajectory",
        "RF_STATUS_OUTSIDE_G = 7",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    // the test harness rebuilds every crate type into deps/, next to this executable
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("libretfields_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
