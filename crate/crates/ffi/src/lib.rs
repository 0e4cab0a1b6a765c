//! C ABI for the gaitdrift library.
//!
//! Objects cross the boundary as opaque handles that must be released with
//! the matching `gd_*_free` function. Fallible calls return a [`GdStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`gd_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gaitdrift::detector::{detect, DetectorConfig, DriftSeries, Weighting};
use gaitdrift::eval::{score, ScoringMode};
use gaitdrift::event_model::{load_event_log, EventLog, LoadOptions};
use gaitdrift::rank_stats::{mann_whitney_u, Alternative, Method};
use gaitdrift::simulator::{simulate, FloorPlan, GroundTruth, Scenario};
use gaitdrift::transition::FilterConfig;
use gaitdrift::Error;

/// Result codes of fallible calls.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    IoError = 4,
    InvalidConfig = 5,
    Unreachable = 6,
    UnknownLayout = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GdAlternative {
    TwoSided = 0,
    Greater = 1,
    Less = 2,
}

impl From<GdAlternative> for Alternative {
    fn from(a: GdAlternative) -> Self {
        match a {
            GdAlternative::TwoSided => Alternative::TwoSided,
            GdAlternative::Greater => Alternative::Greater,
            GdAlternative::Less => Alternative::Less,
        }
    }
}

impl From<Alternative> for GdAlternative {
    fn from(a: Alternative) -> Self {
        match a {
            Alternative::TwoSided => GdAlternative::TwoSided,
            Alternative::Greater => GdAlternative::Greater,
            Alternative::Less => GdAlternative::Less,
        }
    }
}

/// Opaque event log.
pub struct GdEventLog(EventLog);

/// Opaque decision series.
pub struct GdDriftSeries(DriftSeries);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdFilterConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub percentile_k: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdDetectorConfig {
    pub window_len: u32,
    pub alpha: f64,
    pub min_support: usize,
    /// Support-weighted ensemble instead of the unweighted one.
    pub weighted: bool,
    pub decision_threshold: f64,
    pub alternative: GdAlternative,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdDayDecision {
    pub day: u32,
    pub score: f64,
    pub decision: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdMwuResult {
    pub u_statistic: f64,
    pub p_value: f64,
    /// Exact null distribution rather than the normal approximation.
    pub exact: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdScenario {
    pub baseline_speed: f64,
    pub drifted_speed: f64,
    pub onset_day: u32,
    pub num_days: u32,
    pub seed: u64,
    pub sample_rate: f64,
    pub body_radius: f64,
    pub day_length: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GdEvalResult {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// False when no alert was raised on or after the onset.
    pub has_delay: bool,
    pub detection_delay: u32,
    pub tp: u32,
    pub tn: u32,
    pub fp: u32,
    pub fn_: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: GdStatus, msg: &str) -> GdStatus {
    set_last_error(msg);
    status
}

fn status_of(e: &Error) -> GdStatus {
    match e {
        Error::Parse { .. } => GdStatus::ParseError,
        Error::InvalidConfig(_) => GdStatus::InvalidConfig,
        Error::Io(_) => GdStatus::IoError,
        Error::Unreachable { .. } => GdStatus::Unreachable,
        Error::UnknownLayout(_) => GdStatus::UnknownLayout,
        _ => GdStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (GdStatus, String)>) -> GdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GdStatus::Ok,
        Ok(Err((status, msg))) => fail(status, &msg),
        Err(_) => fail(GdStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> (GdStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GdStatus, String) {
    (GdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GdStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GdStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (GdStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn load(reader: impl std::io::BufRead, day_length: f64, has_header: bool) -> Result<Box<GdEventLog>, (GdStatus, String)> {
    let opts = LoadOptions {
        day_length,
        header: has_header,
    };
    load_event_log(reader, opts).map(|l| Box::new(GdEventLog(l))).map_err(lib_err)
}

/// Parses CSV text `timestamp,sensor_id,status`.
///
/// # Safety
/// `csv` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_event_log_from_csv(
    csv: *const c_char,
    day_length: f64,
    has_header: bool,
    out: *mut *mut GdEventLog,
) -> GdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = c_str(csv, "csv")?;
        *out = Box::into_raw(load(text.as_bytes(), day_length, has_header)?);
        Ok(())
    })
}

/// Reads an event CSV file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_event_log_from_file(
    path: *const c_char,
    day_length: f64,
    has_header: bool,
    out: *mut *mut GdEventLog,
) -> GdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = c_str(path, "path")?;
        let file = File::open(path).map_err(|e| (GdStatus::IoError, format!("{path}: {e}")))?;
        *out = Box::into_raw(load(BufReader::new(file), day_length, has_header)?);
        Ok(())
    })
}

/// Writes the log as CSV.
///
/// # Safety
/// `log` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gd_event_log_write_csv(log: *const GdEventLog, path: *const c_char) -> GdStatus {
    guard(|| {
        let log = log.as_ref().ok_or_else(|| null("log"))?;
        let path = c_str(path, "path")?;
        let file = File::create(path).map_err(|e| (GdStatus::IoError, format!("{path}: {e}")))?;
        let mut w = std::io::BufWriter::new(file);
        log.0.write_csv(&mut w).map_err(lib_err)?;
        std::io::Write::flush(&mut w).map_err(|e| (GdStatus::IoError, e.to_string()))
    })
}

/// Number of events; 0 for NULL.
///
/// # Safety
/// `log` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gd_event_log_len(log: *const GdEventLog) -> usize {
    log.as_ref().map_or(0, |l| l.0.len())
}

/// # Safety
/// `log` must be NULL or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gd_event_log_free(log: *mut GdEventLog) {
    if !log.is_null() {
        drop(Box::from_raw(log));
    }
}

#[no_mangle]
pub extern "C" fn gd_filter_config_default() -> GdFilterConfig {
    let d = FilterConfig::default();
    GdFilterConfig {
        t_min: d.t_min,
        t_max: d.t_max,
        percentile_k: d.percentile_k,
    }
}

#[no_mangle]
pub extern "C" fn gd_detector_config_default() -> GdDetectorConfig {
    let d = DetectorConfig::default();
    GdDetectorConfig {
        window_len: d.window_len,
        alpha: d.alpha,
        min_support: d.min_support,
        weighted: d.weighting == Weighting::SupportWeighted,
        decision_threshold: d.decision_threshold,
        alternative: d.alternative.into(),
    }
}

impl From<&GdFilterConfig> for FilterConfig {
    fn from(c: &GdFilterConfig) -> Self {
        FilterConfig {
            t_min: c.t_min,
            t_max: c.t_max,
            percentile_k: c.percentile_k,
        }
    }
}

impl From<&GdDetectorConfig> for DetectorConfig {
    fn from(c: &GdDetectorConfig) -> Self {
        DetectorConfig {
            window_len: c.window_len,
            alpha: c.alpha,
            min_support: c.min_support,
            weighting: if c.weighted {
                Weighting::SupportWeighted
            } else {
                Weighting::Unweighted
            },
            decision_threshold: c.decision_threshold,
            alternative: c.alternative.into(),
        }
    }
}

/// Runs drift detection. NULL configs select the defaults.
///
/// # Safety
/// Pointers must be NULL or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_detect(
    log: *const GdEventLog,
    filter: *const GdFilterConfig,
    detector: *const GdDetectorConfig,
    out: *mut *mut GdDriftSeries,
) -> GdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let log = log.as_ref().ok_or_else(|| null("log"))?;
        let filter = filter.as_ref().map_or_else(FilterConfig::default, FilterConfig::from);
        let detector = detector.as_ref().map_or_else(DetectorConfig::default, DetectorConfig::from);
        let series = detect(&log.0, &filter, &detector).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GdDriftSeries(series)));
        Ok(())
    })
}

/// Number of decided days; 0 for NULL.
///
/// # Safety
/// `series` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gd_drift_series_len(series: *const GdDriftSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// The `index`-th decided day, in increasing day order.
///
/// # Safety
/// `series` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_drift_series_get(
    series: *const GdDriftSeries,
    index: usize,
    out: *mut GdDayDecision,
) -> GdStatus {
    guard(|| {
        let series = series.as_ref().ok_or_else(|| null("series"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = series.0.days.get(index).ok_or_else(|| {
            (GdStatus::OutOfRange, format!("index {index} beyond {} days", series.0.len()))
        })?;
        *out = GdDayDecision {
            day: d.day,
            score: d.score,
            decision: d.decision,
        };
        Ok(())
    })
}

/// # Safety
/// `series` must be NULL or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gd_drift_series_free(series: *mut GdDriftSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Two-sample Mann-Whitney U test of `a` against `b`.
///
/// # Safety
/// `a` and `b` must point to `n_a` and `n_b` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_mann_whitney_u(
    a: *const f64,
    n_a: usize,
    b: *const f64,
    n_b: usize,
    alternative: GdAlternative,
    out: *mut GdMwuResult,
) -> GdStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let a = slice(a, n_a, "a")?;
        let b = slice(b, n_b, "b")?;
        let r = mann_whitney_u(a, b, alternative.into()).map_err(lib_err)?;
        *out = GdMwuResult {
            u_statistic: r.u_statistic,
            p_value: r.p_value,
            exact: r.method == Method::Exact,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn gd_scenario_default() -> GdScenario {
    let d = Scenario::default();
    GdScenario {
        baseline_speed: d.baseline_speed,
        drifted_speed: d.drifted_speed,
        onset_day: d.onset_day,
        num_days: d.num_days,
        seed: d.seed,
        sample_rate: d.sample_rate,
        body_radius: d.body_radius,
        day_length: d.day_length,
    }
}

/// Simulates a scenario in a built-in layout (`"A"`..`"D"`) or a layout
/// TOML file. Ground truth follows from `onset_day` and `num_days`.
///
/// # Safety
/// `layout` must be NUL-terminated, `scenario` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_simulate(
    layout: *const c_char,
    scenario: *const GdScenario,
    out: *mut *mut GdEventLog,
) -> GdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let layout = c_str(layout, "layout")?;
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let scenario = Scenario {
            baseline_speed: s.baseline_speed,
            drifted_speed: s.drifted_speed,
            onset_day: s.onset_day,
            num_days: s.num_days,
            seed: s.seed,
            sample_rate: s.sample_rate,
            body_radius: s.body_radius,
            day_length: s.day_length,
            ..Scenario::default()
        };
        let plan = FloorPlan::resolve(layout).map_err(lib_err)?;
        let (log, _) = simulate(&plan, &scenario).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GdEventLog(log)));
        Ok(())
    })
}

/// Scores a series against labels that switch to drift on `onset_day`
/// (use `num_days + 1` for no drift).
///
/// # Safety
/// `series` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_score(
    series: *const GdDriftSeries,
    onset_day: u32,
    num_days: u32,
    warmup_as_negative: bool,
    out: *mut GdEvalResult,
) -> GdStatus {
    guard(|| {
        let series = series.as_ref().ok_or_else(|| null("series"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let truth = GroundTruth::from_onset(onset_day, num_days);
        let mode = if warmup_as_negative {
            ScoringMode::WarmupAsNegative
        } else {
            ScoringMode::DecidedOnly
        };
        let r = score(&series.0, &truth, mode).map_err(lib_err)?;
        *out = GdEvalResult {
            accuracy: r.accuracy,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
            has_delay: r.detection_delay.is_some(),
            detection_delay: r.detection_delay.unwrap_or(0),
            tp: r.counts.tp,
            tn: r.counts.tn,
            fp: r.counts.fp,
            fn_: r.counts.fn_,
        };
        Ok(())
    })
}
