//! C interface to the cdpic library.
//!
//! Schedules cross the boundary as opaque `CdpicSchedule` handles. Every
//! fallible call returns a `CdpicStatus`; the message for the most recent
//! failure on the calling thread is available from `cdpic_last_error`.
//! Strings handed out by this library must be released with
//! `cdpic_string_free`, handles with `cdpic_schedule_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cdpic::decoder::DecodeMode;
use cdpic::shuffle::efficiency_report;
use cdpic::{
    brute_force_min, construct, HasStatus, OracleConfig, ProblemInstance, Schedule,
    ScheduleDocument, Status,
};

/// Result codes. Values 0 to 5 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdpicStatus {
    Ok = 0,
    Unsatisfied = 1,
    InvalidInput = 2,
    NotConstructible = 3,
    ConstraintViolation = 4,
    CapExceeded = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

impl From<Status> for CdpicStatus {
    fn from(status: Status) -> Self {
        match status {
            Status::Ok => CdpicStatus::Ok,
            Status::Unsatisfied => CdpicStatus::Unsatisfied,
            Status::InvalidInput => CdpicStatus::InvalidInput,
            Status::NotConstructible => CdpicStatus::NotConstructible,
            Status::ConstraintViolation => CdpicStatus::ConstraintViolation,
            Status::CapExceeded => CdpicStatus::CapExceeded,
        }
    }
}

/// Opaque schedule handle.
pub struct CdpicSchedule {
    inner: Schedule,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail<E: HasStatus + std::fmt::Display>(error: E) -> CdpicStatus {
    set_error(error.to_string());
    error.status().into()
}

fn null_pointer(name: &str) -> CdpicStatus {
    set_error(format!("null pointer passed for `{name}`"));
    CdpicStatus::NullPointer
}

/// Runs `body`, turning a panic into `CdpicStatus::Panic`.
fn guarded(body: impl FnOnce() -> CdpicStatus) -> CdpicStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("panic: {message}"));
            CdpicStatus::Panic
        }
    }
}

fn mode(progressive: bool) -> DecodeMode {
    if progressive {
        DecodeMode::Progressive
    } else {
        DecodeMode::Static
    }
}

fn instance(m: usize, c: usize, k: usize, s: usize) -> Result<ProblemInstance, CdpicStatus> {
    ProblemInstance::new(m, c, k, s).map_err(fail)
}

/// Message for the last failed call on this thread, or NULL if it succeeded.
/// The pointer stays valid until the next call into this library from the
/// same thread.
#[no_mangle]
pub extern "C" fn cdpic_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds and verifies the schedule for `(m, c, k, s)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cdpic_construct(
    m: usize,
    c: usize,
    k: usize,
    s: usize,
    out: *mut *mut CdpicSchedule,
) -> CdpicStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        let inst = match instance(m, c, k, s) {
            Ok(inst) => inst,
            Err(status) => return status,
        };
        match construct(&inst) {
            Ok(schedule) => {
                *out = Box::into_raw(Box::new(CdpicSchedule { inner: schedule }));
                CdpicStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a schedule document. Only the structure is checked here; run
/// `cdpic_schedule_verify` to check the decentralized constraint.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer to
/// writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cdpic_schedule_from_json(
    json: *const c_char,
    out: *mut *mut CdpicSchedule,
) -> CdpicStatus {
    guarded(|| {
        if json.is_null() {
            return null_pointer("json");
        }
        if out.is_null() {
            return null_pointer("out");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(text) => text,
            Err(e) => {
                set_error(format!("schedule document is not UTF-8: {e}"));
                return CdpicStatus::InvalidInput;
            }
        };
        match ScheduleDocument::parse(text).and_then(|d| d.to_schedule()) {
            Ok(schedule) => {
                *out = Box::into_raw(Box::new(CdpicSchedule { inner: schedule }));
                CdpicStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Renders the schedule as a JSON document. Release the string with
/// `cdpic_string_free`.
///
/// # Safety
/// `schedule` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdpic_schedule_to_json(
    schedule: *const CdpicSchedule,
    out: *mut *mut c_char,
) -> CdpicStatus {
    guarded(|| {
        let Some(handle) = schedule.as_ref() else {
            return null_pointer("schedule");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        let text = ScheduleDocument::from_schedule(&handle.inner).render();
        match CString::new(text) {
            Ok(s) => {
                *out = s.into_raw();
                CdpicStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                CdpicStatus::InvalidInput
            }
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cdpic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of transmissions; 0 for a NULL handle.
///
/// # Safety
/// `schedule` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdpic_schedule_len(schedule: *const CdpicSchedule) -> usize {
    schedule.as_ref().map_or(0, |h| h.inner.len())
}

/// Copies transmission `index` out of the schedule. The payload message
/// indices are written ascending to `payload`; `payload_len` always receives
/// the full count, so a call with `capacity` 0 can be used to size the
/// buffer.
///
/// # Safety
/// `schedule` must be a live handle, `transmitter` and `payload_len` valid
/// pointers, and `payload` valid for `capacity` writes (or NULL when
/// `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn cdpic_schedule_transmission(
    schedule: *const CdpicSchedule,
    index: usize,
    transmitter: *mut usize,
    payload: *mut usize,
    capacity: usize,
    payload_len: *mut usize,
) -> CdpicStatus {
    guarded(|| {
        let Some(handle) = schedule.as_ref() else {
            return null_pointer("schedule");
        };
        if transmitter.is_null() {
            return null_pointer("transmitter");
        }
        if payload_len.is_null() {
            return null_pointer("payload_len");
        }
        let Some(t) = handle.inner.transmissions.get(index) else {
            set_error(format!(
                "transmission {index} out of range (schedule has {})",
                handle.inner.len()
            ));
            return CdpicStatus::InvalidInput;
        };
        *transmitter = t.transmitter.0;
        *payload_len = t.payload.len();
        if capacity < t.payload.len() {
            set_error(format!(
                "payload needs {} slots, buffer has {capacity}",
                t.payload.len()
            ));
            return CdpicStatus::BufferTooSmall;
        }
        if payload.is_null() {
            return null_pointer("payload");
        }
        for (i, x) in t.payload.iter().enumerate() {
            *payload.add(i) = x.0;
        }
        CdpicStatus::Ok
    })
}

/// Decodes the schedule at every client. Returns `Ok` when each client gets
/// its demand, `Unsatisfied` when some do not, and `ConstraintViolation`
/// when a transmitter sends a message outside its window. `served_total`
/// may be NULL; otherwise it receives the number of messages decoded across
/// all clients.
///
/// # Safety
/// `schedule` must be a live handle and `served_total` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn cdpic_schedule_verify(
    schedule: *const CdpicSchedule,
    progressive: bool,
    served_total: *mut usize,
) -> CdpicStatus {
    guarded(|| {
        let Some(handle) = schedule.as_ref() else {
            return null_pointer("schedule");
        };
        match handle.inner.decode(mode(progressive)) {
            Ok(report) => {
                if !served_total.is_null() {
                    *served_total = report.served_total();
                }
                if report.satisfied {
                    CdpicStatus::Ok
                } else {
                    set_error(format!(
                        "{} client(s) decode fewer than S={}",
                        report.unsatisfied_clients().len(),
                        report.demand
                    ));
                    CdpicStatus::Unsatisfied
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Exhaustive minimum schedule length with the default search caps.
///
/// # Safety
/// `n_min` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdpic_oracle_min(
    m: usize,
    c: usize,
    k: usize,
    s: usize,
    progressive: bool,
    n_min: *mut usize,
) -> CdpicStatus {
    guarded(|| {
        if n_min.is_null() {
            return null_pointer("n_min");
        }
        let inst = match instance(m, c, k, s) {
            Ok(inst) => inst,
            Err(status) => return status,
        };
        match brute_force_min(&inst, mode(progressive), &OracleConfig::default()) {
            Ok(result) => {
                *n_min = result.n_min;
                CdpicStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Uncoded baseline length, constructed length and the percentage of
/// baseline broadcasts the construction removes.
///
/// # Safety
/// The three output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cdpic_efficiency(
    m: usize,
    c: usize,
    k: usize,
    s: usize,
    n_baseline: *mut usize,
    n_achieved: *mut usize,
    efficiency_pct: *mut f64,
) -> CdpicStatus {
    guarded(|| {
        if n_baseline.is_null() || n_achieved.is_null() || efficiency_pct.is_null() {
            return null_pointer("output");
        }
        let inst = match instance(m, c, k, s) {
            Ok(inst) => inst,
            Err(status) => return status,
        };
        match efficiency_report(&inst) {
            Ok(row) => {
                *n_baseline = row.n_baseline;
                *n_achieved = row.n_achieved;
                *efficiency_pct = row.efficiency_pct;
                CdpicStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `schedule` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cdpic_schedule_free(schedule: *mut CdpicSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}
