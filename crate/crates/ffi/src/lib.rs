//! C ABI for `quadlat`.
//!
//! Every entry point returns an `int32_t` status (`QL_OK` on success) and
//! writes results through out-pointers. Rationals cross the boundary as
//! `"p/q"` strings; structured results are JSON strings owned by the caller
//! and released with [`ql_string_free`]. The message for the most recent
//! failure on the calling thread is available from [`ql_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quadlat::checks::{run_checks, CheckContext, CheckKind, CheckReport};
use quadlat::families::{load_custom, CustomInput};
use quadlat::rational::{self, Rational};
use quadlat::theta::theta_to_mu;
use quadlat::{BochnerData, Error, LatticeParams, RacahParams};
use serde_json::json;

pub const QL_OK: i32 = 0;
pub const QL_ERR_NULL_ARG: i32 = 1;
pub const QL_ERR_PARSE: i32 = 2;
pub const QL_ERR_DEGENERATE: i32 = 3;
pub const QL_ERR_INVALID_INPUT: i32 = 4;
pub const QL_ERR_PARAMETER_POLE: i32 = 5;
pub const QL_ERR_INTERNAL: i32 = 6;

/// Opaque handle to Bochner data.
pub struct QlBochner {
    data: BochnerData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail {
    code: i32,
    message: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => QL_ERR_PARSE,
            Error::DegenerateEigenvalues { .. } => QL_ERR_DEGENERATE,
            Error::ParameterPole(_) => QL_ERR_PARAMETER_POLE,
            _ => QL_ERR_INVALID_INPUT,
        };
        Fail { code, message: e.to_string() }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Fail {
    Fail { code, message: message.into() }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior NUL"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard<F>(f: F) -> i32
where
    F: FnOnce() -> Result<(), Fail>,
{
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(fail(QL_ERR_INTERNAL, format!("internal error: {msg}")))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            QL_OK
        }
        Err(e) => {
            set_last_error(Some(e.message));
            e.code
        }
    }
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(QL_ERR_NULL_ARG, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QL_ERR_PARSE, format!("{name} is not UTF-8")))
}

/// # Safety
/// As for [`read_str`].
unsafe fn read_rat(p: *const c_char, name: &str) -> Result<Rational, Fail> {
    Ok(rational::parse(read_str(p, name)?)?)
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(QL_ERR_NULL_ARG, "output pointer is null"));
    }
    // SAFETY: checked non-null; the caller provides writable storage.
    unsafe { out.write(value) };
    Ok(())
}

fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(QL_ERR_NULL_ARG, "output pointer is null"));
    }
    let c = CString::new(s).map_err(|_| fail(QL_ERR_INTERNAL, "string has interior NUL"))?;
    write_out(out, c.into_raw())
}

fn boxed(out: *mut *mut QlBochner, data: BochnerData) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(QL_ERR_NULL_ARG, "output pointer is null"));
    }
    write_out(out, Box::into_raw(Box::new(QlBochner { data })))
}

/// # Safety
/// `h` is null or a live handle from this library.
unsafe fn handle<'a>(h: *const QlBochner) -> Result<&'a QlBochner, Fail> {
    h.as_ref().ok_or_else(|| fail(QL_ERR_NULL_ARG, "handle is null"))
}

/// Creates Bochner data on the lattice `mu = t^2 + c2 t + c3`.
///
/// `phi = a0 mu^2 + a1 mu + a2`, `psi = b0 mu + b1`. No admissibility check
/// is done here; solver entry points report `QL_ERR_DEGENERATE`.
///
/// # Safety
/// All string arguments are valid NUL-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_new(
    c2: *const c_char,
    c3: *const c_char,
    a0: *const c_char,
    a1: *const c_char,
    a2: *const c_char,
    b0: *const c_char,
    b1: *const c_char,
    out: *mut *mut QlBochner,
) -> i32 {
    guard(|| {
        let params = LatticeParams::new(read_rat(c2, "c2")?, read_rat(c3, "c3")?);
        let data = BochnerData::new(
            params,
            read_rat(a0, "a0")?,
            read_rat(a1, "a1")?,
            read_rat(a2, "a2")?,
            read_rat(b0, "b0")?,
            read_rat(b1, "b1")?,
        );
        boxed(out, data)
    })
}

/// Bochner data of the Racah family with the given parameters.
///
/// # Safety
/// As for [`ql_bochner_new`].
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_racah(
    alpha: *const c_char,
    beta: *const c_char,
    gamma: *const c_char,
    delta: *const c_char,
    out: *mut *mut QlBochner,
) -> i32 {
    guard(|| {
        let rp = RacahParams::new(
            read_rat(alpha, "alpha")?,
            read_rat(beta, "beta")?,
            read_rat(gamma, "gamma")?,
            read_rat(delta, "delta")?,
        );
        boxed(out, rp.bochner())
    })
}

/// Parses a JSON configuration document holding Bochner data (or a Racah
/// parameter set).
///
/// # Safety
/// `doc` is a valid NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_from_json(doc: *const c_char, out: *mut *mut QlBochner) -> i32 {
    guard(|| match load_custom(read_str(doc, "doc")?, None)? {
        CustomInput::Bochner(data) => boxed(out, data),
        CustomInput::Family(_) => Err(fail(QL_ERR_INVALID_INPUT, "document holds a family, not Bochner data")),
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_free(h: *mut QlBochner) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `lambda_n` as a `"p/q"` string.
///
/// # Safety
/// `h` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_lambda(h: *const QlBochner, n: usize, out: *mut *mut c_char) -> i32 {
    guard(|| write_string(out, rational::format(&handle(h)?.data.lambda_n(n))))
}

/// `{"beta": [...], "gamma": [...], "lambda": [...]}` for `n = 0..=nmax`,
/// with `gamma[0] = "0"`.
///
/// # Safety
/// `h` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_ttrr_json(h: *const QlBochner, nmax: usize, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let data = &handle(h)?.data;
        let rec = data.ttrr_coeffs(nmax + 1)?;
        let gamma: Vec<Rational> =
            std::iter::once(Rational::default()).chain(rec.gamma.iter().cloned()).collect();
        let v = json!({
            "nmax": nmax,
            "beta": rational::format_vec(&rec.beta),
            "gamma": rational::format_vec(&gamma),
            "lambda": rational::format_vec(&data.lambdas(nmax + 1)),
        });
        write_string(out, v.to_string())
    })
}

/// `{"n": n, "theta": [...], "mu": [...]}` for the monic solution `P_n`.
///
/// # Safety
/// `h` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_solve_json(h: *const QlBochner, n: usize, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let p = handle(h)?.data.solve_pn(n)?;
        let v = json!({
            "n": n,
            "theta": rational::format_vec(p.coeffs()),
            "mu": rational::format_vec(theta_to_mu(&p).coeffs()),
        });
        write_string(out, v.to_string())
    })
}

/// Runs the selected matrix checks at truncation `size` on the family solved
/// from the data. `checks` is a comma list as accepted by the CLI; null means
/// all. The report array goes to `out_json`; `out_pass` receives 1 when every
/// check passed and 0 otherwise.
///
/// # Safety
/// `h` is a live handle; `checks` is null or a valid string; out-pointers are
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ql_bochner_verify_json(
    h: *const QlBochner,
    checks: *const c_char,
    size: usize,
    out_json: *mut *mut c_char,
    out_pass: *mut i32,
) -> i32 {
    guard(|| {
        let data = handle(h)?.data.clone();
        let selection = if checks.is_null() { "all" } else { read_str(checks, "checks")? };
        let kinds = CheckKind::parse_selection(selection)?;
        let ctx = CheckContext::from_bochner(data, size)?;
        let reports: Vec<CheckReport> =
            run_checks(&kinds, &ctx).into_iter().collect::<Result<_, Error>>()?;
        let pass = reports.iter().all(|r| r.pass);
        write_out(out_pass, i32::from(pass))?;
        let text = serde_json::to_string(&reports).map_err(|e| fail(QL_ERR_INTERNAL, e.to_string()))?;
        write_string(out_json, text)
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ql_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn ql_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
