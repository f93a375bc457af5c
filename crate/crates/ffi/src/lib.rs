//! C ABI over `qnlab`.
//!
//! Every function returns a status code (`QNLAB_OK` or a negative
//! `QNLAB_ERR_*`) and writes results through out-pointers. On failure the
//! message is available from [`qnlab_last_error_message`] on the same thread
//! until the next call. Handles are opaque; free them with the matching
//! `*_free` function. Strings returned by the library must be released with
//! [`qnlab_string_free`].
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access the function
//! documents. Null out-pointers and handles are reported as
//! `QNLAB_ERR_NULL`, never dereferenced.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qnlab::exponent::{estimate_k, sample_curve, LambdaGrid};
use qnlab::numerics::{Complex, PrecisionContext};
use qnlab::operators::{OperatorSpec, VectorSpec};
use qnlab::resolvent::{resolvent_norm_spec, shift_norm_bounds};
use qnlab::Error;

pub const QNLAB_OK: c_int = 0;
/// A required pointer was null.
pub const QNLAB_ERR_NULL: c_int = -1;
/// A string argument was not valid UTF-8.
pub const QNLAB_ERR_UTF8: c_int = -2;
/// Malformed input: bad JSON, invalid operator or vector, bad parameters.
pub const QNLAB_ERR_INVALID: c_int = -3;
/// The computation failed: non-convergence, too few samples, no witness.
pub const QNLAB_ERR_NUMERIC: c_int = -4;
/// The command ran but at least one of its checks failed.
pub const QNLAB_ERR_VERIFY: c_int = -5;
/// A Rust panic was caught at the boundary.
pub const QNLAB_ERR_PANIC: c_int = -6;

/// Precision settings shared by the numeric calls.
pub struct QnlabContext {
    ctx: PrecisionContext,
}

/// A validated operator description.
pub struct QnlabOperator {
    spec: OperatorSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(c_int, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() {
            QNLAB_ERR_NUMERIC
        } else {
            QNLAB_ERR_INVALID
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QNLAB_ERR_NULL, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> c_int {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QNLAB_OK,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            QNLAB_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QNLAB_ERR_UTF8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn json_err(e: serde_json::Error) -> Failure {
    Failure(QNLAB_ERR_INVALID, e.to_string())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// owned by the library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn qnlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qnlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a context. `mantissa_bits = 0` and `tol <= 0` select the defaults.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qnlab_context_new(
    mantissa_bits: usize,
    tol: c_double,
    seed: u64,
    out: *mut *mut QnlabContext,
) -> c_int {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mut ctx = PrecisionContext {
            seed,
            ..Default::default()
        };
        if mantissa_bits != 0 {
            ctx.mantissa_bits = mantissa_bits;
        }
        if tol > 0.0 {
            ctx.power_iteration_tol = tol;
        }
        ctx.validate()?;
        *out = Box::into_raw(Box::new(QnlabContext { ctx }));
        Ok(())
    })
}

/// # Safety
/// `ctx` must be null or a handle from [`qnlab_context_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qnlab_context_free(ctx: *mut QnlabContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Parses an operator from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qnlab_operator_from_json(
    json: *const c_char,
    out: *mut *mut QnlabOperator,
) -> c_int {
    guard(|| {
        let text = str_arg(json, "json")?;
        let out = out_arg(out, "out")?;
        let spec: OperatorSpec = serde_json::from_str(text).map_err(json_err)?;
        spec.dim()?;
        *out = Box::into_raw(Box::new(QnlabOperator { spec }));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from [`qnlab_operator_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qnlab_operator_free(op: *mut QnlabOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qnlab_operator_dim(op: *const QnlabOperator, out: *mut usize) -> c_int {
    guard(|| {
        let op = handle(op, "op")?;
        *out_arg(out, "out")? = op.spec.dim()?;
        Ok(())
    })
}

/// `ln ‖(λ−T)^{-1}‖` at `λ = re + i·im`.
///
/// # Safety
/// `ctx` and `op` must be live handles; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qnlab_resolvent_log_norm(
    ctx: *const QnlabContext,
    op: *const QnlabOperator,
    re: c_double,
    im: c_double,
    out: *mut c_double,
) -> c_int {
    guard(|| {
        let ctx = &handle(ctx, "ctx")?.ctx;
        let op = handle(op, "op")?;
        let out = out_arg(out, "out")?;
        let lam = Complex::from_f64(re, im, ctx.bits());
        *out = resolvent_norm_spec(&op.spec, &lam, ctx)?.ln();
        Ok(())
    })
}

/// Regression estimate of `k_x` on the grid `lambda_max · ratio^j · e^{iθ}`.
/// `vector_json` is a vector description; null means the first basis vector.
/// `stderr_out` may be null.
///
/// # Safety
/// Handles must be live; strings NUL-terminated; `slope_out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qnlab_estimate_k(
    ctx: *const QnlabContext,
    op: *const QnlabOperator,
    vector_json: *const c_char,
    lambda_max: c_double,
    ratio: c_double,
    count: usize,
    theta: c_double,
    slope_out: *mut c_double,
    stderr_out: *mut c_double,
) -> c_int {
    guard(|| {
        let ctx = &handle(ctx, "ctx")?.ctx;
        let op = handle(op, "op")?;
        let slope_out = out_arg(slope_out, "slope_out")?;
        let x = if vector_json.is_null() {
            VectorSpec::basis(0)
        } else {
            serde_json::from_str(str_arg(vector_json, "vector_json")?).map_err(json_err)?
        };
        let grid = LambdaGrid {
            lambda_max,
            ratio,
            count,
            theta,
        };
        let est = estimate_k(&sample_curve(&op.spec, &x, &grid, ctx)?)?;
        *slope_out = est.slope;
        if let Some(s) = stderr_out.as_mut() {
            *s = est.slope_stderr;
        }
        Ok(())
    })
}

/// Natural logs of the closed-form lower and upper bounds for
/// `‖(1/t − rA)^{-1}‖`.
///
/// # Safety
/// `lower` and `upper` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qnlab_shift_norm_bounds(
    r: c_double,
    t: c_double,
    lower: *mut c_double,
    upper: *mut c_double,
) -> c_int {
    guard(|| {
        let lower = out_arg(lower, "lower")?;
        let upper = out_arg(upper, "upper")?;
        let (lo, hi) = shift_norm_bounds(r, t, PrecisionContext::default().bits())?;
        *lower = lo.ln();
        *upper = hi.ln();
        Ok(())
    })
}

/// Runs a CLI command (`"estimate-k"`, `"verify-bounds"`, `"synthesize"`,
/// `"volterra-compare"` or `"sweep"`) on a JSON config and returns its JSON
/// report in `*report_out`, also when the command's checks fail
/// (`QNLAB_ERR_VERIFY`). Release the report with [`qnlab_string_free`].
///
/// # Safety
/// Strings must be NUL-terminated; `report_out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qnlab_run_command(
    command: *const c_char,
    config_json: *const c_char,
    report_out: *mut *mut c_char,
) -> c_int {
    let mut verified = true;
    let status = guard(|| {
        let command = str_arg(command, "command")?;
        let config = str_arg(config_json, "config_json")?;
        let out = out_arg(report_out, "report_out")?;
        let outcome = qnlab::cli::run_command(command, config)?;
        let text = serde_json::to_string(&outcome.report).map_err(json_err)?;
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        verified = outcome.verified;
        Ok(())
    });
    if status == QNLAB_OK && !verified {
        set_last_error("verification failed; see the report".into());
        return QNLAB_ERR_VERIFY;
    }
    status
}

/// Frees a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qnlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
