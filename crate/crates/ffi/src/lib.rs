//! C ABI for the vrgaze pipeline.
//!
//! Conventions: every fallible function returns a [`VgStatus`] and writes its
//! result through an out-pointer. JSON inputs are passed as byte buffers
//! (`data`, `len`). Strings returned to the caller are NUL-terminated and must
//! be released with [`vg_string_free`]; handles with their matching `_free`.
//! After a non-OK status, [`vg_last_error`] describes the failure on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vrgaze::canonical::{parse_json, to_canonical_string};
use vrgaze::cli::{analyze, ResultsFile};
use vrgaze::geometry::{angular_speed, classify_zone, ScreenPoint, ScreenZone};
use vrgaze::questionnaire::{cohort_summary, parse_responses};
use vrgaze::report::generate_report;
use vrgaze::script::{parse_script, TestScript};
use vrgaze::session::{parse_session, serialize_session, SessionRecord};
use vrgaze::simulator::{simulate_session, ModelFile, SimConfig};
use vrgaze::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VgStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Validation = 3,
    Config = 4,
    NotFound = 5,
    Domain = 6,
    NoData = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VgZone {
    TopLeft = 0,
    Top = 1,
    TopRight = 2,
    Left = 3,
    Center = 4,
    Right = 5,
    BottomLeft = 6,
    Bottom = 7,
    BottomRight = 8,
}

impl From<ScreenZone> for VgZone {
    fn from(z: ScreenZone) -> Self {
        match z {
            ScreenZone::TopLeft => VgZone::TopLeft,
            ScreenZone::Top => VgZone::Top,
            ScreenZone::TopRight => VgZone::TopRight,
            ScreenZone::Left => VgZone::Left,
            ScreenZone::Center => VgZone::Center,
            ScreenZone::Right => VgZone::Right,
            ScreenZone::BottomLeft => VgZone::BottomLeft,
            ScreenZone::Bottom => VgZone::Bottom,
            ScreenZone::BottomRight => VgZone::BottomRight,
        }
    }
}

/// Parsed, validated session.
pub struct VgSession(SessionRecord);

/// Parsed, validated test script.
pub struct VgScript(TestScript);

/// Analysis results with the overall evaluation.
pub struct VgResults(ResultsFile);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(e: Error) -> VgStatus {
    let status = match &e {
        Error::Parse { .. } => VgStatus::Parse,
        Error::Validation { .. } => VgStatus::Validation,
        Error::Config { .. } => VgStatus::Config,
        Error::NotFound(_) => VgStatus::NotFound,
        Error::NoData(_) => VgStatus::NoData,
        Error::InvalidInterval(_) | Error::Domain(_) | Error::OutOfView { .. } => VgStatus::Domain,
    };
    set_error(e.to_string());
    status
}

fn guard(f: impl FnOnce() -> Result<(), VgStatus>) -> VgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            VgStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            VgStatus::Internal
        }
    }
}

fn null(what: &str) -> VgStatus {
    set_error(format!("{what} is null"));
    VgStatus::NullPointer
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], VgStatus> {
    if data.is_null() {
        if len == 0 {
            return Ok(&[]);
        }
        return Err(null("data"));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, VgStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), VgStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(v);
    Ok(())
}

fn c_string(s: String) -> Result<*mut c_char, VgStatus> {
    CString::new(s).map(CString::into_raw).map_err(|_| {
        set_error("output contains a NUL byte");
        VgStatus::Internal
    })
}

/// Message describing the most recent failure on this thread, or an empty
/// string. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn vg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_session_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut VgSession,
) -> VgStatus {
    guard(|| {
        let rec = parse_session(bytes(data, len)?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(VgSession(rec))))
    })
}

/// # Safety
/// `session` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vg_session_free(session: *mut VgSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Number of frames in the session, or 0 for a null handle.
///
/// # Safety
/// `session` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vg_session_frame_count(session: *const VgSession) -> usize {
    session.as_ref().map_or(0, |s| s.0.frames.len())
}

/// Canonical session JSON.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_session_to_json(
    session: *const VgSession,
    out: *mut *mut c_char,
) -> VgStatus {
    guard(|| {
        let s = handle(session, "session")?;
        let text = String::from_utf8(serialize_session(&s.0)).map_err(|_| VgStatus::Internal)?;
        put(out, c_string(text)?)
    })
}

/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_script_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut VgScript,
) -> VgStatus {
    guard(|| {
        let s = parse_script(bytes(data, len)?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(VgScript(s))))
    })
}

/// # Safety
/// `script` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vg_script_free(script: *mut VgScript) {
    if !script.is_null() {
        drop(Box::from_raw(script));
    }
}

/// Simulates a session. `model` is a model file (`{"gazer": ..., "sim": ...}`).
///
/// # Safety
/// `script` must be a live handle, `model` must point to `model_len`
/// readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_simulate(
    script: *const VgScript,
    model: *const u8,
    model_len: usize,
    seed: u64,
    out: *mut *mut VgSession,
) -> VgStatus {
    guard(|| {
        let s = handle(script, "script")?;
        let m: ModelFile = parse_json(bytes(model, model_len)?).map_err(fail)?;
        m.gazer.validate().map_err(fail)?;
        let cfg = SimConfig {
            seed,
            settings: m.sim,
        };
        cfg.validate().map_err(fail)?;
        let rec = simulate_session(&s.0, &m.gazer, &cfg).map_err(fail)?;
        put(out, Box::into_raw(Box::new(VgSession(rec))))
    })
}

/// # Safety
/// `session` and `script` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_analyze(
    session: *const VgSession,
    script: *const VgScript,
    out: *mut *mut VgResults,
) -> VgStatus {
    guard(|| {
        let se = handle(session, "session")?;
        let sc = handle(script, "script")?;
        let r = analyze(&se.0, &sc.0).map_err(fail)?;
        put(out, Box::into_raw(Box::new(VgResults(r))))
    })
}

/// # Safety
/// `results` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vg_results_free(results: *mut VgResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Canonical results JSON, as written by the `analyze` command.
///
/// # Safety
/// `results` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_results_to_json(
    results: *const VgResults,
    out: *mut *mut c_char,
) -> VgStatus {
    guard(|| {
        let r = handle(results, "results")?;
        put(out, c_string(to_canonical_string(&r.0))?)
    })
}

/// Overall score in `[0, 100]`. Fails with `NoData` when nothing was tested.
///
/// # Safety
/// `results` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_results_total(results: *const VgResults, out: *mut f64) -> VgStatus {
    guard(|| {
        let r = handle(results, "results")?;
        let e =
            r.0.evaluation
                .ok_or_else(|| fail(Error::NoData("no protocol was tested".into())))?;
        put(out, e.total)
    })
}

/// Renders the HTML report and its summary JSON.
///
/// # Safety
/// `session` and `results` must be live handles; both out-pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn vg_report(
    session: *const VgSession,
    results: *const VgResults,
    html_out: *mut *mut c_char,
    summary_out: *mut *mut c_char,
) -> VgStatus {
    guard(|| {
        let se = handle(session, "session")?;
        let r = handle(results, "results")?;
        if html_out.is_null() || summary_out.is_null() {
            return Err(null("out"));
        }
        let doc =
            generate_report(&se.0, &r.0.protocols, r.0.evaluation.as_ref(), None).map_err(fail)?;
        let html = c_string(doc.html)?;
        let summary = match c_string(doc.summary) {
            Ok(s) => s,
            Err(e) => {
                vg_string_free(html);
                return Err(e);
            }
        };
        put(html_out, html)?;
        put(summary_out, summary)
    })
}

/// Scores a responses file and returns the scores JSON.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_score_questionnaire(
    data: *const u8,
    len: usize,
    out: *mut *mut c_char,
) -> VgStatus {
    guard(|| {
        let records = parse_responses(bytes(data, len)?).map_err(fail)?;
        let summary = cohort_summary(&records).map_err(fail)?;
        put(out, c_string(to_canonical_string(&summary))?)
    })
}

/// Angular speed in degrees per second.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_angular_speed(
    delta_deg: f64,
    delta_t_s: f64,
    out: *mut f64,
) -> VgStatus {
    guard(|| put(out, angular_speed(delta_deg, delta_t_s).map_err(fail)?))
}

/// Zone of a normalized screen point. Fails with `Domain` outside `[0, 1]²`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vg_classify_zone(u: f64, v: f64, out: *mut VgZone) -> VgStatus {
    guard(|| {
        put(
            out,
            VgZone::from(classify_zone(ScreenPoint::new(u, v)).map_err(fail)?),
        )
    })
}

/// Name of a zone, e.g. `"TopLeft"`. Static storage; do not free.
#[no_mangle]
pub extern "C" fn vg_zone_name(zone: VgZone) -> *const c_char {
    let s: &'static CStr = match zone {
        VgZone::TopLeft => c"TopLeft",
        VgZone::Top => c"Top",
        VgZone::TopRight => c"TopRight",
        VgZone::Left => c"Left",
        VgZone::Center => c"Center",
        VgZone::Right => c"Right",
        VgZone::BottomLeft => c"BottomLeft",
        VgZone::Bottom => c"Bottom",
        VgZone::BottomRight => c"BottomRight",
    };
    s.as_ptr()
}
