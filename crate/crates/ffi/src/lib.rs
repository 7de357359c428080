//! C interface to `mbqc-fidelity`.
//!
//! Every fallible function returns an [`MfStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`mf_last_error`] on the same thread. Handles are opaque and must be
//! released with the matching `_free` function. Strings returned by the
//! library are released with [`mf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mbqc_fidelity::error::ExitCode;
use mbqc_fidelity::estimate::sample_count;
use mbqc_fidelity::omega::{build_omega, spectral_summary};
use mbqc_fidelity::resource::{cluster_1d, cluster_2d, ResourceFile};
use mbqc_fidelity::sampler::{RngStream, Sampler};
use mbqc_fidelity::{Error, ResourceState};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfStatus {
    MfOk = 0,
    MfNullPointer = 1,
    MfValidation = 2,
    MfCapExceeded = 3,
    MfIo = 4,
    MfInternal = 5,
    MfPanic = 6,
}

/// A resource state with flow.
pub struct MfState {
    inner: ResourceState,
}

/// Draws stabilizers from the Ω distribution of a state. Draw `k` uses
/// stream `k` of the seed, so a sampler reproduces its sequence exactly.
pub struct MfSampler {
    inner: Sampler,
    seed: u64,
    next: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MfSpectralSummary {
    pub max: f64,
    pub beta: f64,
    pub tau: f64,
    pub nu: f64,
    pub max_multiplicity: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MfStatus {
    match err {
        Error::CrossCheck(_) => MfStatus::MfInternal,
        _ => match err.exit_code() {
            ExitCode::Cap => MfStatus::MfCapExceeded,
            ExitCode::Io => MfStatus::MfIo,
            _ => MfStatus::MfValidation,
        },
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MfStatus::MfOk,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MfStatus::MfNullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MfStatus::MfPanic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Lib(Error::InvalidParameter("string contains a NUL byte".into())))
}

fn boxed_state(state: ResourceState) -> *mut MfState {
    Box::into_raw(Box::new(MfState { inner: state }))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_state_cluster_1d(n: usize, out: *mut *mut MfState) -> MfStatus {
    guard(|| {
        let s = cluster_1d(n)?;
        write(out, boxed_state(s), "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_state_cluster_2d(rows: usize, cols: usize, out: *mut *mut MfState) -> MfStatus {
    guard(|| {
        let s = cluster_2d(rows, cols)?;
        write(out, boxed_state(s), "out")
    })
}

/// Parses a resource-state JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_state_from_json(json: *const c_char, out: *mut *mut MfState) -> MfStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Error::InvalidParameter(format!("input is not UTF-8: {e}")))?;
        let s = ResourceState::from_file(&ResourceFile::from_json(text)?)?;
        write(out, boxed_state(s), "out")
    })
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_state_to_json(state: *const MfState, out: *mut *mut c_char) -> MfStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let text = to_c_string(s.inner.to_file().to_json())?;
        write(out, text, "out")
    })
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_state_num_qubits(state: *const MfState, out: *mut usize) -> MfStatus {
    guard(|| {
        let s = deref(state, "state")?;
        write(out, s.inner.n(), "out")
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_state_free(state: *mut MfState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Ω as a JSON Pauli sum with exact coefficients.
///
/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_omega_json(state: *const MfState, enum_cap: usize, out: *mut *mut c_char) -> MfStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let sum = build_omega(&s.inner, enum_cap)?;
        let text = serde_json::to_string(&sum.to_file()).map_err(Error::from)?;
        write(out, to_c_string(text)?, "out")
    })
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_spectral_summary(
    state: *const MfState,
    spectral_cap: usize,
    out: *mut MfSpectralSummary,
) -> MfStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let sum = spectral_summary(&s.inner, spectral_cap)?;
        let summary = MfSpectralSummary {
            max: sum.max_eig,
            beta: sum.second_eig,
            tau: sum.min_eig,
            nu: sum.nu,
            max_multiplicity: sum.max_multiplicity,
        };
        write(out, summary, "out")
    })
}

/// Number of single-shot measurements for precision `epsilon` with
/// confidence `1 - delta`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_sample_count(epsilon: f64, delta: f64, out: *mut u64) -> MfStatus {
    guard(|| write(out, sample_count(epsilon, delta)?, "out"))
}

/// # Safety
/// `state` must be a live handle and `out` valid for writes. The sampler does
/// not borrow the state, which may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn mf_sampler_new(state: *const MfState, seed: u64, out: *mut *mut MfSampler) -> MfStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let sampler = MfSampler {
            inner: Sampler::new(&s.inner)?,
            seed,
            next: 0,
        };
        write(out, Box::into_raw(Box::new(sampler)), "out")
    })
}

/// Draws the next signed Pauli word, e.g. `-YXYZ`, and its probability as
/// `2^log2_prob`. `log2_prob` may be null.
///
/// # Safety
/// `sampler` must be a live handle, `word` valid for writes and `log2_prob`
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mf_sampler_next(sampler: *mut MfSampler, word: *mut *mut c_char, log2_prob: *mut i32) -> MfStatus {
    guard(|| {
        let s = sampler.as_mut().ok_or(Failure::Null("sampler"))?;
        if word.is_null() {
            return Err(Failure::Null("word"));
        }
        let trace = s.inner.sample_stream(RngStream::new(s.seed, s.next));
        s.next += 1;
        word.write(to_c_string(trace.result.to_string())?);
        if !log2_prob.is_null() {
            log2_prob.write(trace.log2_prob);
        }
        Ok(())
    })
}

/// # Safety
/// `sampler` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mf_sampler_free(sampler: *mut MfSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}
