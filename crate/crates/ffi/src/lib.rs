//! C interface to the archivers and the basic set operations.
//!
//! Every function returns a [`MoaStatus`]; on failure the message is
//! available from [`moa_last_error`] until the next failing call on the same
//! thread. Objective vectors are passed as row-major `count × dim` arrays of
//! doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use moarchive::{Archiver, ArchiverConfig, Batch, Error, ObjectiveVector};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    Usage = 4,
    Domain = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Opaque archiver handle.
pub struct MoaArchiver {
    inner: Archiver,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: MoaStatus, message: impl Into<String>) -> MoaStatus {
    let msg = CString::new(message.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn from_error(e: Error) -> MoaStatus {
    let status = match &e {
        Error::Domain(_) => MoaStatus::Domain,
        Error::Format { .. } => MoaStatus::InvalidJson,
        _ => MoaStatus::Usage,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> MoaStatus) -> MoaStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(MoaStatus::Panic, "internal panic"))
}

/// Message describing the last failure on this thread, or NULL. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn moa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

unsafe fn read_points(values: *const f64, count: usize, dim: usize) -> Result<Vec<ObjectiveVector>, MoaStatus> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if values.is_null() {
        return Err(fail(MoaStatus::NullPointer, "values is NULL"));
    }
    let Some(len) = count.checked_mul(dim) else {
        return Err(fail(MoaStatus::OutOfRange, "count * dim overflows"));
    };
    // SAFETY: the caller guarantees `values` points at `count * dim` doubles.
    let flat = unsafe { slice::from_raw_parts(values, len) };
    flat.chunks(dim.max(1)).map(|c| ObjectiveVector::new(c.to_vec()).map_err(from_error)).collect()
}

/// Creates an archiver from a JSON configuration (with explicit indicator
/// settings) for `dim` objectives and stores the handle in `*out`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moa_archiver_new(
    config_json: *const c_char,
    dim: usize,
    out: *mut *mut MoaArchiver,
) -> MoaStatus {
    guard(|| {
        if config_json.is_null() || out.is_null() {
            return fail(MoaStatus::NullPointer, "config_json and out must not be NULL");
        }
        // SAFETY: checked non-null; the caller guarantees NUL termination.
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(t) => t,
            Err(_) => return fail(MoaStatus::InvalidUtf8, "config is not UTF-8"),
        };
        let config: ArchiverConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(MoaStatus::InvalidJson, e.to_string()),
        };
        match Archiver::new(config, dim) {
            Ok(inner) => {
                // SAFETY: checked non-null.
                unsafe { *out = Box::into_raw(Box::new(MoaArchiver { inner })) };
                MoaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases an archiver. NULL is ignored.
///
/// # Safety
/// `archiver` must come from [`moa_archiver_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn moa_archiver_free(archiver: *mut MoaArchiver) {
    if !archiver.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(archiver) });
    }
}

/// Offers `count` solutions as one batch.
///
/// # Safety
/// `archiver` must be a live handle and `values` hold `count * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn moa_archiver_push_batch(
    archiver: *mut MoaArchiver,
    values: *const f64,
    count: usize,
    dim: usize,
) -> MoaStatus {
    guard(|| {
        // SAFETY: the caller guarantees a live handle or NULL.
        let Some(a) = (unsafe { archiver.as_mut() }) else {
            return fail(MoaStatus::NullPointer, "archiver is NULL");
        };
        if dim != a.inner.dim() {
            return fail(MoaStatus::Usage, format!("expected dimension {}, got {dim}", a.inner.dim()));
        }
        // SAFETY: forwarded caller guarantee.
        let solutions = match unsafe { read_points(values, count, dim) } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match a.inner.fold_batch(&Batch { t: 0, solutions }) {
            Ok(()) => MoaStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Offers one solution of `dim` objectives.
///
/// # Safety
/// As [`moa_archiver_push_batch`] with `count = 1`.
#[no_mangle]
pub unsafe extern "C" fn moa_archiver_push(archiver: *mut MoaArchiver, values: *const f64, dim: usize) -> MoaStatus {
    // SAFETY: forwarded caller guarantee.
    unsafe { moa_archiver_push_batch(archiver, values, 1, dim) }
}

/// Stores the number of archive members in `*out_len`.
///
/// # Safety
/// `archiver` must be a live handle and `out_len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moa_archiver_len(archiver: *const MoaArchiver, out_len: *mut usize) -> MoaStatus {
    guard(|| {
        // SAFETY: the caller guarantees a live handle or NULL.
        let Some(a) = (unsafe { archiver.as_ref() }) else {
            return fail(MoaStatus::NullPointer, "archiver is NULL");
        };
        if out_len.is_null() {
            return fail(MoaStatus::NullPointer, "out_len is NULL");
        }
        // SAFETY: checked non-null.
        unsafe { *out_len = a.inner.members().len() };
        MoaStatus::Ok
    })
}

/// Copies member `index` into `out_values`, which must hold `dim` doubles.
///
/// # Safety
/// `archiver` must be a live handle and `out_values` hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn moa_archiver_member(
    archiver: *const MoaArchiver,
    index: usize,
    out_values: *mut f64,
    dim: usize,
) -> MoaStatus {
    guard(|| {
        // SAFETY: the caller guarantees a live handle or NULL.
        let Some(a) = (unsafe { archiver.as_ref() }) else {
            return fail(MoaStatus::NullPointer, "archiver is NULL");
        };
        if out_values.is_null() {
            return fail(MoaStatus::NullPointer, "out_values is NULL");
        }
        if dim != a.inner.dim() {
            return fail(MoaStatus::Usage, format!("expected dimension {}, got {dim}", a.inner.dim()));
        }
        let members = a.inner.members();
        let Some(m) = members.get(index) else {
            return fail(MoaStatus::OutOfRange, format!("index {index} out of {}", members.len()));
        };
        // SAFETY: the caller guarantees room for `dim` doubles.
        unsafe { slice::from_raw_parts_mut(out_values, dim) }.copy_from_slice(m.values());
        MoaStatus::Ok
    })
}

/// Hypervolume of `count` points with respect to `reference`.
///
/// # Safety
/// `points` must hold `count * dim` doubles, `reference` `dim` doubles and
/// `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moa_hypervolume(
    points: *const f64,
    count: usize,
    dim: usize,
    reference: *const f64,
    out: *mut f64,
) -> MoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(MoaStatus::NullPointer, "out is NULL");
        }
        // SAFETY: forwarded caller guarantees.
        let (set, r) = match unsafe { (read_points(points, count, dim), read_points(reference, 1, dim)) } {
            (Ok(s), Ok(r)) => (s, r),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        match moarchive::indicators::hypervolume(&set, &r[0]) {
            Ok(v) => {
                // SAFETY: checked non-null.
                unsafe { *out = v };
                MoaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Whether set `a` is better than set `b`: `a` weakly dominates `b` but
/// not the other way round.
///
/// # Safety
/// `a` must hold `a_count * dim` doubles, `b` `b_count * dim` doubles and
/// `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moa_better(
    a: *const f64,
    a_count: usize,
    b: *const f64,
    b_count: usize,
    dim: usize,
    out: *mut bool,
) -> MoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(MoaStatus::NullPointer, "out is NULL");
        }
        // SAFETY: forwarded caller guarantees.
        let (a, b) = match unsafe { (read_points(a, a_count, dim), read_points(b, b_count, dim)) } {
            (Ok(a), Ok(b)) => (a, b),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        match moarchive::better(&a, &b) {
            Ok(v) => {
                // SAFETY: checked non-null.
                unsafe { *out = v };
                MoaStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
