//! C interface to `hhh-core`.
//!
//! Every function returns an [`HhhStatus`]. On failure a message is kept per
//! thread and can be read with [`hhh_last_error`]. Handles are opaque and must
//! be released with the matching `_free` function; strings returned through
//! `char **` out-parameters are released with [`hhh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use hhh_core::engine::{CoxeterDegrees, Engine, EvalMode};
use hhh_core::error::{BaseCaseError, EngineError, VerifyError};
use hhh_core::format::{format_series, Format};
use hhh_core::oracle::Oracle;
use hhh_core::ring::GradedSeries;
use hhh_core::selftest::bundled_a0_table;
use hhh_core::torus_base::BaseCaseTable;
use hhh_core::verify::{compare_with_ideal, positivity_check};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HhhStatus {
    Ok = 0,
    Mismatch = 1,
    InvalidInput = 2,
    MissingBaseCase = 3,
    NullPointer = 4,
    Parse = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HhhFormat {
    Text = 0,
    Latex = 1,
    Json = 2,
}

impl From<HhhFormat> for Format {
    fn from(f: HhhFormat) -> Self {
        match f {
            HhhFormat::Text => Format::Text,
            HhhFormat::Latex => Format::Latex,
            HhhFormat::Json => Format::Json,
        }
    }
}

/// Recursion engine with its base-case table. Starts with the bundled
/// `a = 0` entries.
pub struct HhhEngine {
    inner: Engine,
}

/// A computed series `P / (1 - q)^e`.
pub struct HhhSeries {
    inner: GradedSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(HhhStatus, String);

type Outcome<T> = Result<T, Failure>;

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn engine_failure(e: EngineError) -> Failure {
    let status = match e {
        EngineError::MissingBaseCase { .. } => HhhStatus::MissingBaseCase,
        EngineError::InvalidDegrees(_) => HhhStatus::InvalidInput,
        EngineError::Cache(_) => HhhStatus::Io,
    };
    Failure(status, e.to_string())
}

fn basecase_failure(e: BaseCaseError) -> Failure {
    let status = match e {
        BaseCaseError::Io(_) => HhhStatus::Io,
        BaseCaseError::Parse(_) | BaseCaseError::ChecksumMismatch { .. } => HhhStatus::Parse,
        _ => HhhStatus::InvalidInput,
    };
    Failure(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Outcome<()>) -> HhhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HhhStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HhhStatus::Internal
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(HhhStatus::NullPointer, format!("{what} is null")))
}

fn degrees(d: *const u32) -> Outcome<CoxeterDegrees> {
    if d.is_null() {
        return Err(Failure(HhhStatus::NullPointer, "degree array is null".into()));
    }
    let mut arr = [0u32; 4];
    // SAFETY: the caller promises four readable u32 values.
    unsafe { ptr::copy_nonoverlapping(d, arr.as_mut_ptr(), 4) };
    CoxeterDegrees::new(arr).map_err(engine_failure)
}

fn put_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(HhhStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|e| Failure(HhhStatus::Internal, e.to_string()))?;
    // SAFETY: `out` is non-null and writable by contract.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn read_str<'a>(s: *const c_char) -> Outcome<&'a str> {
    if s.is_null() {
        return Err(Failure(HhhStatus::NullPointer, "string argument is null".into()));
    }
    // SAFETY: non-null and NUL-terminated by contract.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|e| Failure(HhhStatus::InvalidInput, e.to_string()))
}

/// Creates an engine. Returns null only on allocation failure.
#[no_mangle]
pub extern "C" fn hhh_engine_new() -> *mut HhhEngine {
    catch_unwind(|| {
        Box::into_raw(Box::new(HhhEngine {
            inner: Engine::with_bases(bundled_a0_table()),
        }))
    })
    .unwrap_or(ptr::null_mut())
}

/// # Safety
/// `engine` must be null or a pointer from [`hhh_engine_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hhh_engine_free(engine: *mut HhhEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Adds the entries of a base-case file to the engine's table.
///
/// # Safety
/// `engine` must be a live engine handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hhh_engine_import_basecases(engine: *mut HhhEngine, path: *const c_char) -> HhhStatus {
    guard(|| {
        let engine = non_null(engine, "engine")?;
        let path = read_str(path)?;
        let table = BaseCaseTable::import(Path::new(path)).map_err(basecase_failure)?;
        engine.inner.merge_bases(&table).map_err(basecase_failure)
    })
}

/// HHH of the Coxeter braid with degrees `d[0..4]`; `a0` selects the `a = 0`
/// specialization.
///
/// # Safety
/// `engine` must be a live engine handle, `d` must point to four `uint32_t`
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_engine_compute(
    engine: *const HhhEngine,
    d: *const u32,
    a0: bool,
    out: *mut *mut HhhSeries,
) -> HhhStatus {
    guard(|| {
        let engine = non_null(engine, "engine")?;
        if out.is_null() {
            return Err(Failure(HhhStatus::NullPointer, "output pointer is null".into()));
        }
        let d = degrees(d)?;
        let mode = if a0 { EvalMode::A0 } else { EvalMode::FullA };
        let x = engine.inner.hhh_coxeter(&d, mode).map_err(engine_failure)?;
        *out = Box::into_raw(Box::new(HhhSeries { inner: x }));
        Ok(())
    })
}

/// Parses a series from its canonical text form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_series_parse(text: *const c_char, out: *mut *mut HhhSeries) -> HhhStatus {
    guard(|| {
        let text = read_str(text)?;
        if out.is_null() {
            return Err(Failure(HhhStatus::NullPointer, "output pointer is null".into()));
        }
        let x = GradedSeries::parse_canonical_text(text).map_err(|e| Failure(HhhStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(HhhSeries { inner: x }));
        Ok(())
    })
}

/// # Safety
/// `series` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hhh_series_free(series: *mut HhhSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Renders a series as text, LaTeX or JSON.
///
/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_series_format(
    series: *const HhhSeries,
    format: HhhFormat,
    out: *mut *mut c_char,
) -> HhhStatus {
    guard(|| {
        let series = non_null(series, "series")?;
        put_string(out, format_series(&series.inner, format.into()))
    })
}

/// Coefficient of `q^q t^t a^a` in the power-series expansion.
///
/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_series_coefficient(
    series: *const HhhSeries,
    q: u32,
    t: i32,
    a: u32,
    out: *mut i64,
) -> HhhStatus {
    guard(|| {
        let series = non_null(series, "series")?;
        if out.is_null() {
            return Err(Failure(HhhStatus::NullPointer, "output pointer is null".into()));
        }
        let c = series.inner.expand(q).get(q, t, a);
        *out = i64::try_from(c).map_err(|e| Failure(HhhStatus::InvalidInput, format!("coefficient overflow: {e}")))?;
        Ok(())
    })
}

/// Writes whether every expansion coefficient up to `order` is nonnegative.
///
/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_series_is_positive(series: *const HhhSeries, order: u32, out: *mut bool) -> HhhStatus {
    guard(|| {
        let series = non_null(series, "series")?;
        if out.is_null() {
            return Err(Failure(HhhStatus::NullPointer, "output pointer is null".into()));
        }
        *out = positivity_check("series", &series.inner, order).pass;
        Ok(())
    })
}

/// Bigraded Hilbert function of the ideal `J(d)` up to total degree
/// `max_total`, in the text table format.
///
/// # Safety
/// `d` must point to four `uint32_t` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_hilb_table(d: *const u32, max_total: u32, out: *mut *mut c_char) -> HhhStatus {
    guard(|| {
        let d = degrees(d)?;
        let t = Oracle::new()
            .hilb_table(&d, max_total)
            .map_err(|e| Failure(HhhStatus::Io, e.to_string()))?;
        put_string(out, t.to_text())
    })
}

/// Compares the engine's `a = 0` series with the ideal oracle. Writes the
/// JSON report and returns `HHH_STATUS_MISMATCH` when the verdict is fail.
///
/// # Safety
/// `engine` must be a live handle, `d` must point to four `uint32_t` and
/// `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhh_verify(
    engine: *const HhhEngine,
    d: *const u32,
    max_total: u32,
    report: *mut *mut c_char,
) -> HhhStatus {
    guard(|| {
        let engine = non_null(engine, "engine")?;
        let d = degrees(d)?;
        let r = compare_with_ideal(&engine.inner, &Oracle::new(), &d, max_total).map_err(|e| match e {
            VerifyError::Engine(e) => engine_failure(e),
            VerifyError::AmbiguousShift(_) => Failure(HhhStatus::Mismatch, e.to_string()),
            VerifyError::Oracle(_) => Failure(HhhStatus::Io, e.to_string()),
        })?;
        put_string(report, r.to_json())?;
        if r.verdict {
            Ok(())
        } else {
            Err(Failure(HhhStatus::Mismatch, "engine and oracle disagree".into()))
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hhh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hhh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
