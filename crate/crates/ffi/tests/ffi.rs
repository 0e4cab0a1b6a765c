use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use gaitdrift_ffi::*;

fn last_error() -> String {
    let p = gd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn parse_detect_and_free() {
    let mut csv = String::new();
    for day in 0..20 {
        let t0 = f64::from(day) * 100.0;
        for k in 0..5 {
            let t = t0 + f64::from(k) * 10.0;
            csv.push_str(&format!("{t},a,ON\n{},b,ON\n", t + 2.0 + f64::from(day) * 0.1));
        }
    }
    let csv = CString::new(csv).unwrap();
    let mut log = ptr::null_mut();
    let st = unsafe { gd_event_log_from_csv(csv.as_ptr(), 100.0, false, &mut log) };
    assert_eq!(st, GdStatus::Ok);
    assert_eq!(unsafe { gd_event_log_len(log) }, 200);

    let mut series = ptr::null_mut();
    let st = unsafe { gd_detect(log, ptr::null(), ptr::null(), &mut series) };
    assert_eq!(st, GdStatus::Ok);
    let n = unsafe { gd_drift_series_len(series) };
    assert_eq!(n, 20 - 14 + 1);
    let mut d = GdDayDecision { day: 0, score: 0.0, decision: false };
    assert_eq!(unsafe { gd_drift_series_get(series, 0, &mut d) }, GdStatus::Ok);
    assert_eq!(d.day, 14);
    assert_eq!(unsafe { gd_drift_series_get(series, n, &mut d) }, GdStatus::OutOfRange);

    let mut r = std::mem::MaybeUninit::<GdEvalResult>::uninit();
    assert_eq!(unsafe { gd_score(series, 15, 20, false, r.as_mut_ptr()) }, GdStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert_eq!(r.tp + r.tn + r.fp + r.fn_, 7);

    unsafe {
        gd_drift_series_free(series);
        gd_event_log_free(log);
    }
}

#[test]
fn null_pointers_are_reported() {
    let mut log = ptr::null_mut();
    assert_eq!(unsafe { gd_event_log_from_csv(ptr::null(), 86400.0, false, &mut log) }, GdStatus::NullPointer);
    assert!(last_error().contains("csv"));
    assert!(log.is_null());
    let mut series = ptr::null_mut();
    assert_eq!(unsafe { gd_detect(ptr::null(), ptr::null(), ptr::null(), &mut series) }, GdStatus::NullPointer);
    assert_eq!(unsafe { gd_event_log_len(ptr::null()) }, 0);
    assert_eq!(unsafe { gd_drift_series_len(ptr::null()) }, 0);
    unsafe {
        gd_event_log_free(ptr::null_mut());
        gd_drift_series_free(ptr::null_mut());
    }
}

#[test]
fn error_codes_map_library_errors() {
    let bad = CString::new("1.0,a,ON\n2.0,b,maybe\n").unwrap();
    let mut log = ptr::null_mut();
    assert_eq!(unsafe { gd_event_log_from_csv(bad.as_ptr(), 86400.0, false, &mut log) }, GdStatus::ParseError);
    assert!(last_error().contains("line 2"));

    let missing = CString::new("/nonexistent/events.csv").unwrap();
    assert_eq!(unsafe { gd_event_log_from_file(missing.as_ptr(), 86400.0, false, &mut log) }, GdStatus::IoError);

    let mut out = GdMwuResult { u_statistic: 0.0, p_value: 0.0, exact: false };
    assert_eq!(
        unsafe { gd_mann_whitney_u(ptr::null(), 0, [1.0].as_ptr(), 1, GdAlternative::TwoSided, &mut out) },
        GdStatus::InvalidArgument
    );

    let layout = CString::new("Z").unwrap();
    let sc = gd_scenario_default();
    assert_eq!(unsafe { gd_simulate(layout.as_ptr(), &sc, &mut log) }, GdStatus::UnknownLayout);
    let layout = CString::new("A").unwrap();
    let bad_sc = GdScenario { baseline_speed: 5.0, ..sc };
    assert_eq!(unsafe { gd_simulate(layout.as_ptr(), &bad_sc, &mut log) }, GdStatus::InvalidConfig);

    let csv = CString::new("1.0,a,ON\n").unwrap();
    assert_eq!(unsafe { gd_event_log_from_csv(csv.as_ptr(), 86400.0, false, &mut log) }, GdStatus::Ok);
    let det = GdDetectorConfig { alpha: 2.0, ..gd_detector_config_default() };
    let mut series = ptr::null_mut();
    assert_eq!(unsafe { gd_detect(log, ptr::null(), &det, &mut series) }, GdStatus::InvalidConfig);
    unsafe { gd_event_log_free(log) };
}

#[test]
fn rank_test_matches_known_exact_value() {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
    let b = [8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0];
    let mut out = GdMwuResult { u_statistic: -1.0, p_value: -1.0, exact: false };
    let st = unsafe { gd_mann_whitney_u(a.as_ptr(), 7, b.as_ptr(), 7, GdAlternative::TwoSided, &mut out) };
    assert_eq!(st, GdStatus::Ok);
    assert_eq!(out.u_statistic, 0.0);
    assert!(out.exact);
    assert!((out.p_value - 2.0 / 3432.0).abs() < 1e-15);
}

#[test]
fn defaults_mirror_library() {
    let f = gd_filter_config_default();
    assert_eq!((f.t_min, f.t_max, f.percentile_k), (1.0, 60.0, 0.0));
    let d = gd_detector_config_default();
    assert_eq!((d.window_len, d.alpha, d.min_support, d.weighted), (7, 0.05, 0, false));
    assert_eq!(d.alternative, GdAlternative::TwoSided);
    let s = gd_scenario_default();
    assert_eq!((s.baseline_speed, s.drifted_speed, s.onset_day, s.num_days), (1.2, 0.4, 100, 200));
}

#[test]
fn short_simulation_round_trip() {
    let layout = CString::new("B").unwrap();
    let sc = GdScenario { num_days: 3, onset_day: 2, seed: 11, ..gd_scenario_default() };
    let mut log = ptr::null_mut();
    assert_eq!(unsafe { gd_simulate(layout.as_ptr(), &sc, &mut log) }, GdStatus::Ok);
    let n = unsafe { gd_event_log_len(log) };
    assert!(n > 0);
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("events.csv").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { gd_event_log_write_csv(log, path.as_ptr()) }, GdStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { gd_event_log_from_file(path.as_ptr(), 86400.0, false, &mut again) }, GdStatus::Ok);
    assert_eq!(unsafe { gd_event_log_len(again) }, n);
    unsafe {
        gd_event_log_free(log);
        gd_event_log_free(again);
    }
}

fn header() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gaitdrift.h")).unwrap()
}

#[test]
fn header_declares_the_api() {
    let h = header();
    for name in [
        "gd_last_error",
        "gd_version",
        "gd_event_log_from_csv",
        "gd_event_log_from_file",
        "gd_event_log_write_csv",
        "gd_event_log_len",
        "gd_event_log_free",
        "gd_filter_config_default",
        "gd_detector_config_default",
        "gd_detect",
        "gd_drift_series_len",
        "gd_drift_series_get",
        "gd_drift_series_free",
        "gd_mann_whitney_u",
        "gd_scenario_default",
        "gd_simulate",
        "gd_score",
        "GD_STATUS_OK",
        "typedef struct GdEventLog GdEventLog",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(
        &src,
        "#include \"gaitdrift.h\"\nint main(void) { GdStatus s = GD_STATUS_OK; GdFilterConfig f = gd_filter_config_default(); (void)f; return (int)s; }\n",
    )
    .unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "C compiler rejected the header"),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
