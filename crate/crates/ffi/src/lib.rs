//! C ABI for `freeqm`.
//!
//! Every function returns an [`FqmStatus`]. On failure the message is kept
//! per thread and can be read with [`fqm_last_error`]. Strings handed out
//! by the library must be released with [`fqm_string_free`]; handles with
//! their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freeqm::decomp::Scheme;
use freeqm::qm::Quasimorphism;
use freeqm::report::run_primitive;
use freeqm::words::{parse_word, print_word, GroupCtx};
use freeqm::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqmStatus {
    Ok = 0,
    VerificationFailed = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ConfigError = 4,
    InternalError = 5,
    NullPointer = 6,
}

/// Opaque decomposition scheme.
pub struct FqmScheme {
    scheme: Scheme,
}

/// Opaque quasimorphism.
pub struct FqmQuasimorphism {
    ctx: GroupCtx,
    qm: Quasimorphism,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FqmStatus {
    match e {
        Error::InvalidCharacter { .. }
        | Error::LetterOutOfRank { .. }
        | Error::NotReduced(_)
        | Error::Descriptor { .. } => FqmStatus::ParseError,
        Error::InvalidRank(_) | Error::Config(_) | Error::IdentityPattern => FqmStatus::ConfigError,
        Error::NotAPiece(_)
        | Error::Degree { .. }
        | Error::Domain(_)
        | Error::NotAligned(_)
        | Error::Unsupported(_) => FqmStatus::InvalidArgument,
        Error::Consistency(_) | Error::Io(_) => FqmStatus::InternalError,
    }
}

struct Fail(FqmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus a last-error message.
fn guard<F: FnOnce() -> Result<FqmStatus, Fail>>(f: F) -> FqmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            status
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FqmStatus::InternalError
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(FqmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FqmStatus::ParseError, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(FqmStatus::NullPointer, format!("{what} is null")));
    }
    *out = value;
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

fn ctx(rank: u32) -> Result<GroupCtx, Fail> {
    Ok(GroupCtx::new(rank as usize)?)
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fqm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fqm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Freely reduces `word`; `*out` receives the reduced word (`"1"` for the identity).
///
/// # Safety
/// `word` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fqm_word_reduce(rank: u32, word: *const c_char, out: *mut *mut c_char) -> FqmStatus {
    guard(|| {
        let g = parse_word(read_str(word, "word")?, ctx(rank)?)?;
        write_out(out, c_string(print_word(&g)), "out")?;
        Ok(FqmStatus::Ok)
    })
}

/// Creates a scheme from a descriptor such as `brooks:w=ab` or `rolli`.
///
/// # Safety
/// `descriptor` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fqm_scheme_new(
    rank: u32,
    descriptor: *const c_char,
    out: *mut *mut FqmScheme,
) -> FqmStatus {
    guard(|| {
        let scheme = Scheme::parse(read_str(descriptor, "descriptor")?, ctx(rank)?)?;
        write_out(out, Box::into_raw(Box::new(FqmScheme { scheme })), "out")?;
        Ok(FqmStatus::Ok)
    })
}

/// Decomposes `word`; `*out` receives a JSON array of piece strings.
///
/// # Safety
/// `scheme` must be a live handle; `word` a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fqm_scheme_decompose(
    scheme: *const FqmScheme,
    word: *const c_char,
    out: *mut *mut c_char,
) -> FqmStatus {
    guard(|| {
        let scheme = scheme
            .as_ref()
            .ok_or_else(|| Fail(FqmStatus::NullPointer, "scheme is null".into()))?;
        let g = parse_word(read_str(word, "word")?, scheme.scheme.ctx())?;
        let pieces = scheme.scheme.decompose(&g).to_strings();
        let json = serde_json::to_string(&pieces).map_err(|e| Fail(FqmStatus::InternalError, e.to_string()))?;
        write_out(out, c_string(json), "out")?;
        Ok(FqmStatus::Ok)
    })
}

/// # Safety
/// `scheme` must be null or a handle from [`fqm_scheme_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fqm_scheme_free(scheme: *mut FqmScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Creates a quasimorphism from a descriptor such as `sms:w=aba`.
///
/// # Safety
/// `descriptor` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fqm_qm_new(
    rank: u32,
    descriptor: *const c_char,
    out: *mut *mut FqmQuasimorphism,
) -> FqmStatus {
    guard(|| {
        let ctx = ctx(rank)?;
        let qm = Quasimorphism::parse(read_str(descriptor, "descriptor")?, ctx)?;
        write_out(out, Box::into_raw(Box::new(FqmQuasimorphism { ctx, qm })), "out")?;
        Ok(FqmStatus::Ok)
    })
}

/// Evaluates the quasimorphism at `word` as a reduced fraction `num/den`.
///
/// # Safety
/// `qm` must be a live handle; `word` a nul-terminated string; `num`, `den` writable.
#[no_mangle]
pub unsafe extern "C" fn fqm_qm_eval(
    qm: *const FqmQuasimorphism,
    word: *const c_char,
    num: *mut i64,
    den: *mut i64,
) -> FqmStatus {
    guard(|| {
        let qm = qm
            .as_ref()
            .ok_or_else(|| Fail(FqmStatus::NullPointer, "qm is null".into()))?;
        let g = parse_word(read_str(word, "word")?, qm.ctx)?;
        let v = qm.qm.eval(&g);
        write_out(num, *v.numer(), "num")?;
        write_out(den, *v.denom(), "den")?;
        Ok(FqmStatus::Ok)
    })
}

/// # Safety
/// `qm` must be null or a handle from [`fqm_qm_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fqm_qm_free(qm: *mut FqmQuasimorphism) {
    if !qm.is_null() {
        drop(Box::from_raw(qm));
    }
}

/// Builds β for `(qm, omega)` and verifies it on the budget. `*out_json`
/// receives the report. Returns `Ok` if every check passed and
/// `VerificationFailed` otherwise; the report is written in both cases.
///
/// # Safety
/// `qm` and `omega` must be nul-terminated strings; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn fqm_verify_primitive(
    rank: u32,
    qm: *const c_char,
    omega: *const c_char,
    k: u32,
    budget: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> FqmStatus {
    guard(|| {
        let qm = read_str(qm, "qm")?;
        let omega = read_str(omega, "omega")?;
        if out_json.is_null() {
            return Err(Fail(FqmStatus::NullPointer, "out_json is null".into()));
        }
        let run = run_primitive(ctx(rank)?, qm, omega, k as usize, budget as usize, seed, false)?;
        let json = serde_json::to_string(&run).map_err(|e| Fail(FqmStatus::InternalError, e.to_string()))?;
        write_out(out_json, c_string(json), "out_json")?;
        Ok(if run.pass {
            FqmStatus::Ok
        } else {
            FqmStatus::VerificationFailed
        })
    })
}
