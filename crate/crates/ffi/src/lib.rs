//! C ABI over `circle-density`.
//!
//! Every fallible call returns a [`CdStatus`]; on failure the message is
//! available from [`cd_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circle_density::conjecture_search::{search, Schedule, SearchConfig};
use circle_density::exact_oracle::verify_example1;
use circle_density::gap_tracker::{GapTracker, TrajectoryRecord};
use circle_density::sequences::{self, SequenceStream};
use circle_density::theorem_suite::{verify_w1, verify_w2, WindowReport};
use circle_density::{CirclePoint, Error, SequenceSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    /// A stream has no more points.
    Exhausted = 4,
    /// A verification found at least one violation.
    Violation = 5,
    Internal = 6,
}

/// One trajectory row. `has_min_gap` is false for the first point, in which
/// case the three min-gap fields are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdRecord {
    pub n: u64,
    pub dispersion: f64,
    pub min_gap: f64,
    pub n_dispersion: f64,
    pub n_min_gap: f64,
    pub phi: f64,
    pub dispersion_ratio: f64,
    pub min_gap_ratio: f64,
    pub has_min_gap: bool,
}

impl From<TrajectoryRecord> for CdRecord {
    fn from(r: TrajectoryRecord) -> Self {
        CdRecord {
            n: r.n,
            dispersion: r.dispersion,
            min_gap: r.min_gap.unwrap_or(f64::NAN),
            n_dispersion: r.n_dispersion,
            n_min_gap: r.n_min_gap.unwrap_or(f64::NAN),
            phi: r.phi,
            dispersion_ratio: r.dispersion_ratio,
            min_gap_ratio: r.min_gap_ratio.unwrap_or(f64::NAN),
            has_min_gap: r.min_gap.is_some(),
        }
    }
}

/// Incremental `D_n` / `d_n` tracker.
pub struct CdTracker {
    inner: GapTracker,
}

/// Cursor over the points of a sequence spec.
pub struct CdStream {
    inner: SequenceStream,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: CdStatus, msg: impl Into<String>) -> CdStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> CdStatus {
    let status = match e {
        Error::Io { .. } | Error::PointFile { .. } | Error::InsufficientPoints { .. } => CdStatus::Io,
        _ => CdStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> CdStatus) -> CdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CdStatus::Internal, "internal panic"),
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> CdStatus {
    if out.is_null() {
        return fail(CdStatus::NullPointer, "output pointer is null");
    }
    unsafe { out.write(value) };
    CdStatus::Ok
}

unsafe fn parse_spec(spec: *const c_char) -> Result<SequenceSpec, CdStatus> {
    if spec.is_null() {
        return Err(fail(CdStatus::NullPointer, "spec is null"));
    }
    let s = unsafe { CStr::from_ptr(spec) }
        .to_str()
        .map_err(|_| fail(CdStatus::InvalidArgument, "spec is not UTF-8"))?;
    s.parse().map_err(from_error)
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// `(ln(n + 1) - ln n) / (2 ln 2)`.
#[no_mangle]
pub unsafe extern "C" fn cd_phi(n: u64, out: *mut f64) -> CdStatus {
    match circle_density::phi(n) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => from_error(e),
    }
}

/// Circle distance after reducing both arguments mod 1; NaN for non-finite
/// input.
#[no_mangle]
pub extern "C" fn cd_rho(s: f64, t: f64) -> f64 {
    match (CirclePoint::new(s), CirclePoint::new(t)) {
        (Ok(s), Ok(t)) => circle_density::rho(s, t),
        _ => f64::NAN,
    }
}

#[no_mangle]
pub unsafe extern "C" fn cd_log_odd_point(k: u64, out: *mut f64) -> CdStatus {
    match sequences::log_odd_point(k) {
        Ok(p) => unsafe { write_out(out, p.value()) },
        Err(e) => from_error(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn cd_kronecker_point(alpha: f64, k: u64, out: *mut f64) -> CdStatus {
    match sequences::kronecker_point(alpha, k) {
        Ok(p) => unsafe { write_out(out, p.value()) },
        Err(e) => from_error(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn cd_van_der_corput_point(base: u64, k: u64, out: *mut f64) -> CdStatus {
    match sequences::van_der_corput_point(base, k) {
        Ok(p) => unsafe { write_out(out, p.value()) },
        Err(e) => from_error(e),
    }
}

/// Opens a stream over the first `n_max` points of `spec` (same syntax as
/// the CLI `--sequence` flag).
#[no_mangle]
pub unsafe extern "C" fn cd_stream_open(spec: *const c_char, n_max: u64, out: *mut *mut CdStream) -> CdStatus {
    guard(|| {
        if out.is_null() {
            return fail(CdStatus::NullPointer, "output pointer is null");
        }
        let spec = match unsafe { parse_spec(spec) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match sequences::sequence_stream(&spec, n_max) {
            Ok(inner) => unsafe { write_out(out, Box::into_raw(Box::new(CdStream { inner }))) },
            Err(e) => from_error(e),
        }
    })
}

/// Next point, or `Exhausted` once `n_max` points have been produced.
#[no_mangle]
pub unsafe extern "C" fn cd_stream_next(stream: *mut CdStream, out: *mut f64) -> CdStatus {
    let Some(stream) = (unsafe { stream.as_mut() }) else {
        return fail(CdStatus::NullPointer, "stream is null");
    };
    match stream.inner.next() {
        Some(p) => unsafe { write_out(out, p.value()) },
        None => CdStatus::Exhausted,
    }
}

#[no_mangle]
pub unsafe extern "C" fn cd_stream_free(stream: *mut CdStream) {
    if !stream.is_null() {
        drop(unsafe { Box::from_raw(stream) });
    }
}

#[no_mangle]
pub extern "C" fn cd_tracker_new() -> *mut CdTracker {
    Box::into_raw(Box::new(CdTracker {
        inner: GapTracker::new(),
    }))
}

/// Adds `x` (reduced mod 1) and writes the new row to `out` unless `out` is
/// null.
#[no_mangle]
pub unsafe extern "C" fn cd_tracker_push(tracker: *mut CdTracker, x: f64, out: *mut CdRecord) -> CdStatus {
    let Some(tracker) = (unsafe { tracker.as_mut() }) else {
        return fail(CdStatus::NullPointer, "tracker is null");
    };
    let p = match CirclePoint::new(x) {
        Ok(p) => p,
        Err(e) => return from_error(e),
    };
    let rec = CdRecord::from(tracker.inner.push(p));
    if !out.is_null() {
        unsafe { out.write(rec) };
    }
    CdStatus::Ok
}

/// Points pushed so far, duplicates included.
#[no_mangle]
pub unsafe extern "C" fn cd_tracker_len(tracker: *const CdTracker) -> u64 {
    unsafe { tracker.as_ref() }.map_or(0, |t| t.inner.state().inserted() as u64)
}

#[no_mangle]
pub unsafe extern "C" fn cd_tracker_free(tracker: *mut CdTracker) {
    if !tracker.is_null() {
        drop(unsafe { Box::from_raw(tracker) });
    }
}

/// Exact log-odd check for every `n <= n_max`. Writes the number of
/// violations (if `violations` is non-null) and returns `Violation` when it
/// is positive.
#[no_mangle]
pub unsafe extern "C" fn cd_verify_example1(n_max: u64, violations: *mut u64) -> CdStatus {
    guard(|| {
        let report = verify_example1(n_max, false);
        let count = report.violations.len() as u64;
        if !violations.is_null() {
            unsafe { violations.write(count) };
        }
        if count == 0 {
            CdStatus::Ok
        } else {
            fail(CdStatus::Violation, format!("{count} violations"))
        }
    })
}

unsafe fn window_suite(
    spec: *const c_char,
    n_max: u64,
    failed: *mut u64,
    run: fn(&SequenceSpec, u64) -> circle_density::Result<Vec<WindowReport>>,
) -> CdStatus {
    guard(|| {
        let spec = match unsafe { parse_spec(spec) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let reports = match run(&spec, n_max) {
            Ok(r) => r,
            Err(e) => return from_error(e),
        };
        let count = reports.iter().filter(|r| !r.satisfied).count() as u64;
        if !failed.is_null() {
            unsafe { failed.write(count) };
        }
        if count == 0 {
            CdStatus::Ok
        } else {
            fail(CdStatus::Violation, format!("{count} unsatisfied windows"))
        }
    })
}

/// Windowed dispersion bound: every window `[n, 2n-1]`, `n <= n_max`, needs a
/// witness. Writes the number of unsatisfied windows to `failed`.
#[no_mangle]
pub unsafe extern "C" fn cd_verify_w1(spec: *const c_char, n_max: u64, failed: *mut u64) -> CdStatus {
    unsafe { window_suite(spec, n_max, failed, verify_w1) }
}

/// Windowed minimal-gap bound over `[2n+1, 4n]`, `n <= n_max`.
#[no_mangle]
pub unsafe extern "C" fn cd_verify_w2(spec: *const c_char, n_max: u64, failed: *mut u64) -> CdStatus {
    unsafe { window_suite(spec, n_max, failed, verify_w2) }
}

/// Runs the conjecture search. `out_points` must hold `horizon` doubles; the
/// best objective goes to `out_j`.
#[no_mangle]
pub unsafe extern "C" fn cd_search(
    horizon: usize,
    restarts: u32,
    seed: u64,
    iterations: u32,
    initial_step: f64,
    decay: f64,
    floor_n: usize,
    out_points: *mut f64,
    out_j: *mut f64,
) -> CdStatus {
    guard(|| {
        if out_points.is_null() || out_j.is_null() {
            return fail(CdStatus::NullPointer, "output pointer is null");
        }
        let config = SearchConfig {
            horizon,
            restarts,
            seed,
            schedule: Schedule {
                initial_step,
                decay,
                iterations,
            },
            floor_n,
        };
        match search(&config) {
            Ok(res) => {
                let dst = unsafe { std::slice::from_raw_parts_mut(out_points, horizon) };
                for (d, p) in dst.iter_mut().zip(&res.best_points) {
                    *d = p.value();
                }
                unsafe { out_j.write(res.value) };
                CdStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
