//! C ABI over the `weil` crate.
//!
//! Every entry point returns a [`WeilStatus`]. Objects cross the boundary as
//! opaque handles that the caller releases with the matching `*_free`
//! function; strings returned through out-parameters are released with
//! [`weil_string_free`]. After a non-`Ok` status, [`weil_last_error`] holds a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use weil::cli::demos::run_demo;
use weil::cli::manifest::Manifest;
use weil::cli::render::{Format, RunReport};
use weil::cli::{self, CliError};
use weil::weil::WeilAlgebra;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilStatus {
    Ok = 0,
    /// A null pointer or a string that is not UTF-8.
    InvalidArgument = 1,
    /// Malformed manifest, expression or algebra specification.
    InvalidInput = 2,
    /// The request is well formed but cannot be carried out, e.g. a parity
    /// mismatch between structure and algebra.
    Unsupported = 3,
    /// A bug inside the library; the message carries the panic payload.
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilFormat {
    Text = 0,
    Json = 1,
    Latex = 2,
}

impl From<WeilFormat> for Format {
    fn from(f: WeilFormat) -> Self {
        match f {
            WeilFormat::Text => Format::Text,
            WeilFormat::Json => Format::Json,
            WeilFormat::Latex => Format::Latex,
        }
    }
}

/// A parsed Weil algebra.
pub struct WeilAlgebraHandle(WeilAlgebra);

/// A parsed structure manifest.
pub struct WeilManifest(Manifest);

/// The outcome of a verify, lift, compare or demo run.
pub struct WeilReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(WeilStatus, String);

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Lift(_) | CliError::Structure(_) | CliError::NoVectorField => WeilStatus::Unsupported,
            _ => WeilStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WeilStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(Failure(WeilStatus::Internal, msg))
    });
    match outcome {
        Ok(()) => {
            set_error("");
            WeilStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_error(&msg);
            status
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(WeilStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(WeilStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(WeilStatus::InvalidArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(WeilStatus::InvalidArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(WeilStatus::Internal, "string contains NUL".into()))?;
    put(out, c.into_raw())
}

fn seed(has_seed: bool, seed: u64) -> Option<u64> {
    has_seed.then_some(seed)
}

/// Message for the last failing call on this thread, or the empty string.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn weil_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn weil_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `dual`, `trivial`, `jet(k)` or `truncated(n,k)`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_algebra_parse(spec: *const c_char, out: *mut *mut WeilAlgebraHandle) -> WeilStatus {
    guard(|| {
        let a: WeilAlgebra = text(spec, "spec")?.parse().map_err(|e: weil::weil::WeilError| Failure(WeilStatus::InvalidInput, e.to_string()))?;
        put(out, Box::into_raw(Box::new(WeilAlgebraHandle(a))))
    })
}

/// # Safety
/// `a` must be null or a handle from [`weil_algebra_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn weil_algebra_free(a: *mut WeilAlgebraHandle) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live algebra handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_algebra_dim(a: *const WeilAlgebraHandle, out: *mut usize) -> WeilStatus {
    guard(|| put(out, handle(a, "algebra")?.0.dim()))
}

/// # Safety
/// `a` must be a live algebra handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_algebra_nilpotency_order(a: *const WeilAlgebraHandle, out: *mut usize) -> WeilStatus {
    guard(|| put(out, handle(a, "algebra")?.0.nilpotency_order()))
}

/// Writes `a_i * a_j` as `dim` coefficients into `out`, converted to double.
///
/// # Safety
/// `a` must be a live algebra handle; `out` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn weil_algebra_basis_product(a: *const WeilAlgebraHandle, i: usize, j: usize, out: *mut f64) -> WeilStatus {
    guard(|| {
        let a = &handle(a, "algebra")?.0;
        let l = a.dim();
        if i >= l || j >= l {
            return Err(Failure(WeilStatus::InvalidArgument, format!("basis index out of range for dimension {l}")));
        }
        if out.is_null() {
            return Err(Failure(WeilStatus::InvalidArgument, "output pointer is null".into()));
        }
        let prod = a.mul_rational(&a.basis_rational(i), &a.basis_rational(j));
        for (k, c) in prod.iter().enumerate() {
            out.add(k).write(weil::expr::rational_to_f64(c));
        }
        Ok(())
    })
}

/// Human-readable summary: basis, nilpotency, multiplication table and the
/// Gram forms of the preset functionals.
///
/// # Safety
/// `a` must be a live algebra handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_algebra_info(a: *const WeilAlgebraHandle, out: *mut *mut c_char) -> WeilStatus {
    guard(|| put_string(out, cli::algebra_info(&handle(a, "algebra")?.0)))
}

/// Parses a structure manifest from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_manifest_parse(json: *const c_char, out: *mut *mut WeilManifest) -> WeilStatus {
    guard(|| {
        let m = Manifest::from_json(text(json, "json")?).map_err(|e| Failure::from(CliError::from(e)))?;
        put(out, Box::into_raw(Box::new(WeilManifest(m))))
    })
}

/// # Safety
/// `m` must be null or a handle from [`weil_manifest_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn weil_manifest_free(m: *mut WeilManifest) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn run_manifest(
    m: *const WeilManifest,
    has_seed: bool,
    seed_value: u64,
    out: *mut *mut WeilReport,
    f: fn(&Manifest, Option<u64>) -> Result<RunReport, CliError>,
) -> WeilStatus {
    guard(|| {
        let r = f(&handle(m, "manifest")?.0, seed(has_seed, seed_value))?;
        put(out, Box::into_raw(Box::new(WeilReport(r))))
    })
}

/// Verifies the base structure. `seed` overrides the manifest's seed when
/// `has_seed` is true.
///
/// # Safety
/// `m` must be a live manifest handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_verify(m: *const WeilManifest, has_seed: bool, seed: u64, out: *mut *mut WeilReport) -> WeilStatus {
    run_manifest(m, has_seed, seed, out, cli::verify)
}

/// Lifts the structure and re-verifies it on the lifted patch.
///
/// # Safety
/// `m` must be a live manifest handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_lift(m: *const WeilManifest, has_seed: bool, seed: u64, out: *mut *mut WeilReport) -> WeilStatus {
    run_manifest(m, has_seed, seed, out, cli::lift)
}

/// Compares the canonical and averaged lifts of the manifest's vector field.
///
/// # Safety
/// `m` must be a live manifest handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_compare_lifts(m: *const WeilManifest, has_seed: bool, seed: u64, out: *mut *mut WeilReport) -> WeilStatus {
    run_manifest(m, has_seed, seed, out, cli::compare_lifts)
}

/// Runs a named demo.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_demo(name: *const c_char, has_seed: bool, seed: u64, slow: bool, out: *mut *mut WeilReport) -> WeilStatus {
    guard(|| {
        let r = run_demo(text(name, "name")?, self::seed(has_seed, seed), slow)?;
        put(out, Box::into_raw(Box::new(WeilReport(r))))
    })
}

/// # Safety
/// `r` must be null or a report handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn weil_report_free(r: *mut WeilReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Whether every section of the report met its expectation.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_report_passed(r: *const WeilReport, out: *mut bool) -> WeilStatus {
    guard(|| put(out, handle(r, "report")?.0.passed))
}

/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weil_report_render(r: *const WeilReport, format: WeilFormat, out: *mut *mut c_char) -> WeilStatus {
    guard(|| put_string(out, handle(r, "report")?.0.render(format.into())))
}
