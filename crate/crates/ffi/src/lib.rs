//! C ABI over `probalign`.
//!
//! Every fallible function returns a [`PaStatus`]; on failure a message is
//! kept per thread and read back with [`pa_last_error_message`]. Handles are
//! opaque and owned by the caller until passed to the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use probalign::align::{move_cost, Alignment, CostFunction, SearchOptions};
use probalign::builders::MoveKind;
use probalign::experiment::{align_case, Algorithm};
use probalign::io::{self, AlignmentDocument, CaseResult, ReadOptions};
use probalign::petri::PetriNet;
use probalign::problog::ProbEventLog;
use probalign::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Unsupported = 4,
    InvalidInput = 5,
    InvalidEpsilon = 6,
    IndexOutOfRange = 7,
    NoAlignment = 8,
    BudgetExceeded = 9,
    Timeout = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaCostKind {
    /// Unit costs on the most probable activity of each event.
    Standard = 0,
    /// Log-probability costs with a trust threshold.
    Weighted = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaMoveKind {
    Sync = 0,
    Log = 1,
    Model = 2,
    TauModel = 3,
}

/// One step of an alignment. `event` is -1 for moves that consume no event.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PaMove {
    pub kind: PaMoveKind,
    pub event: i64,
    pub weight: f64,
    pub cost: f64,
}

pub struct PaNet(PetriNet);

pub struct PaLog(ProbEventLog);

pub struct PaAlignment {
    case_id: String,
    algorithm: Algorithm,
    inner: Alignment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PaStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => PaStatus::Parse,
        Error::UnsupportedFeature { .. } => PaStatus::Unsupported,
        Error::InvalidEpsilon(_) => PaStatus::InvalidEpsilon,
        Error::NoAlignment => PaStatus::NoAlignment,
        Error::NodeBudgetExceeded(_) => PaStatus::BudgetExceeded,
        Error::Timeout(_) => PaStatus::Timeout,
        Error::Io(_) => PaStatus::Io,
        _ => PaStatus::InvalidInput,
    }
}

struct Fail(PaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), format!("{}: {e}", e.kind()))
    }
}

fn null(what: &str) -> Fail {
    Fail(PaStatus::NullArgument, format!("{what} is null"))
}

/// Runs `f`, records any failure, and never lets a panic cross the boundary.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PaStatus::Panic
        }
    }
}

unsafe fn bytes<'a>(data: *const u8, len: usize) -> Result<&'a [u8], Fail> {
    if data.is_null() {
        return if len == 0 { Ok(&[]) } else { Err(null("data")) };
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(PaStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn give<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn opts(renormalize: bool) -> ReadOptions {
    ReadOptions { renormalize, ..ReadOptions::default() }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn pa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_net_read_pnml(data: *const u8, len: usize, out: *mut *mut PaNet) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let net = io::read_pnml(bytes(data, len)?)?;
        give(out, PaNet(net));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_net_read_pnml_file(path: *const c_char, out: *mut *mut PaNet) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let net = io::read_pnml_file(Path::new(text(path, "path")?))?;
        give(out, PaNet(net));
        Ok(())
    })
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pa_net_free(net: *mut PaNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Reads a JSON probabilistic log. Non-zero `renormalize` rescales events
/// whose probabilities do not sum to one.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_log_read_json(
    data: *const u8,
    len: usize,
    renormalize: i32,
    out: *mut *mut PaLog,
) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let log = io::read_prob_log_json(bytes(data, len)?, &opts(renormalize != 0))?;
        give(out, PaLog(log));
        Ok(())
    })
}

/// Reads one case from an activity-by-event CSV matrix.
///
/// # Safety
/// `data` must point to `len` readable bytes, `case_id` must be a
/// NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_log_read_csv(
    data: *const u8,
    len: usize,
    case_id: *const c_char,
    renormalize: i32,
    out: *mut *mut PaLog,
) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let case_id = text(case_id, "case_id")?;
        let log = io::read_prob_trace_csv(bytes(data, len)?, case_id, &opts(renormalize != 0))?;
        give(out, PaLog(log));
        Ok(())
    })
}

/// Number of cases, or 0 for a null handle.
///
/// # Safety
/// `log` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pa_log_trace_count(log: *const PaLog) -> usize {
    log.as_ref().map_or(0, |l| l.0.traces.len())
}

/// # Safety
/// `log` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pa_log_free(log: *mut PaLog) {
    if !log.is_null() {
        drop(Box::from_raw(log));
    }
}

/// Aligns case `index` of `log` against `net`. `epsilon` is ignored for
/// [`PaCostKind::Standard`]; `max_expansions` of 0 keeps the default budget.
///
/// # Safety
/// `net` and `log` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_align_trace(
    net: *const PaNet,
    log: *const PaLog,
    index: usize,
    cost: PaCostKind,
    epsilon: f64,
    max_expansions: u64,
    out: *mut *mut PaAlignment,
) -> PaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let net = &get(net, "net")?.0;
        let log = &get(log, "log")?.0;
        let trace = log.traces.get(index).ok_or_else(|| {
            Fail(
                PaStatus::IndexOutOfRange,
                format!("case index {index} out of range for {} cases", log.traces.len()),
            )
        })?;
        let algorithm = match cost {
            PaCostKind::Standard => Algorithm::Standard,
            PaCostKind::Weighted => Algorithm::ProbCost { epsilon },
        };
        let mut options = SearchOptions::default();
        if max_expansions > 0 {
            options.budget.max_expansions = max_expansions;
        }
        let inner = align_case(net, trace, algorithm, &options)?;
        give(out, PaAlignment { case_id: trace.case_id.clone(), algorithm, inner });
        Ok(())
    })
}

/// Total cost, or NaN for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pa_alignment_cost(a: *const PaAlignment) -> f64 {
    a.as_ref().map_or(f64::NAN, |a| a.inner.total_cost)
}

/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pa_alignment_move_count(a: *const PaAlignment) -> usize {
    a.as_ref().map_or(0, |a| a.inner.moves.len())
}

fn kind_to_c(k: MoveKind) -> PaMoveKind {
    match k {
        MoveKind::Sync => PaMoveKind::Sync,
        MoveKind::Log => PaMoveKind::Log,
        MoveKind::Model => PaMoveKind::Model,
        MoveKind::TauModel => PaMoveKind::TauModel,
    }
}

fn kind_from_c(k: PaMoveKind) -> MoveKind {
    match k {
        PaMoveKind::Sync => MoveKind::Sync,
        PaMoveKind::Log => MoveKind::Log,
        PaMoveKind::Model => MoveKind::Model,
        PaMoveKind::TauModel => MoveKind::TauModel,
    }
}

/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_alignment_move(a: *const PaAlignment, i: usize, out: *mut PaMove) -> PaStatus {
    guard(|| {
        let a = get(a, "alignment")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = a
            .inner
            .moves
            .get(i)
            .ok_or_else(|| Fail(PaStatus::IndexOutOfRange, format!("move {i} out of range")))?;
        *out = PaMove {
            kind: kind_to_c(m.kind),
            event: m.event.map_or(-1, |e| e as i64),
            weight: m.weight,
            cost: m.cost,
        };
        Ok(())
    })
}

/// The alignment as a one-case alignment document. Release with
/// [`pa_string_free`].
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_alignment_to_json(a: *const PaAlignment, out: *mut *mut c_char) -> PaStatus {
    guard(|| {
        let a = get(a, "alignment")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let case = CaseResult::from_alignment(a.case_id.clone(), &a.inner)?;
        let doc = AlignmentDocument::new(a.algorithm.name(), a.inner.cost_function, vec![case]);
        let json = io::write_alignment_document(&doc);
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `a` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pa_alignment_free(a: *mut PaAlignment) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Cost of a single move with the given weight.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pa_move_cost(
    kind: PaMoveKind,
    weight: f64,
    cost: PaCostKind,
    epsilon: f64,
    out: *mut f64,
) -> PaStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cf = match cost {
            PaCostKind::Standard => CostFunction::Standard,
            PaCostKind::Weighted => CostFunction::weighted(epsilon)?,
        };
        *out = move_cost(kind_from_c(kind), weight, cf)?;
        Ok(())
    })
}
