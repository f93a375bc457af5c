use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qnlab_ffi::*;

fn last_error() -> String {
    let p = qnlab_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn operator(json: &str) -> *mut QnlabOperator {
    let text = CString::new(json).unwrap();
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { qnlab_operator_from_json(text.as_ptr(), &mut op) }, QNLAB_OK);
    op
}

#[test]
fn estimate_through_handles() {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { qnlab_context_new(0, 0.0, 3, &mut ctx) }, QNLAB_OK);
    let op = operator(r#"{"type":"jordan_nilpotent","n":4}"#);
    let mut dim = 0usize;
    assert_eq!(unsafe { qnlab_operator_dim(op, &mut dim) }, QNLAB_OK);
    assert_eq!(dim, 4);
    let (mut slope, mut err) = (0.0, 0.0);
    let status = unsafe {
        qnlab_estimate_k(ctx, op, ptr::null(), 0.5, 0.8, 40, 0.0, &mut slope, &mut err)
    };
    assert_eq!(status, QNLAB_OK);
    assert!((slope - 1.0).abs() < 1e-3);
    assert!(err >= 0.0);

    // too few grid points is a numeric failure
    let status = unsafe {
        qnlab_estimate_k(ctx, op, ptr::null(), 0.5, 0.8, 3, 0.0, &mut slope, ptr::null_mut())
    };
    assert_eq!(status, QNLAB_ERR_NUMERIC);
    assert!(last_error().contains("samples"));

    unsafe {
        qnlab_operator_free(op);
        qnlab_context_free(ctx);
    }
}

#[test]
fn resolvent_norm_of_jordan_two() {
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { qnlab_context_new(0, 0.0, 0, &mut ctx) }, QNLAB_OK);
    let op = operator(r#"{"type":"jordan_nilpotent","n":2}"#);
    let mut v = 0.0;
    assert_eq!(unsafe { qnlab_resolvent_log_norm(ctx, op, 0.5, 0.0, &mut v) }, QNLAB_OK);
    // (λ−J)^{-1} = [[2, 0], [4, 2]]; top singular value 2 + 2√2
    assert!((v - (2.0 + 8f64.sqrt()).ln()).abs() < 1e-9);
    assert_eq!(unsafe { qnlab_resolvent_log_norm(ctx, op, 0.0, 0.0, &mut v) }, QNLAB_ERR_INVALID);
    unsafe {
        qnlab_operator_free(op);
        qnlab_context_free(ctx);
    }
}

#[test]
fn null_and_bad_input() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { qnlab_resolvent_log_norm(ptr::null(), ptr::null(), 0.5, 0.0, &mut v) },
        QNLAB_ERR_NULL
    );
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { qnlab_context_new(4, 0.0, 0, &mut ctx) }, QNLAB_ERR_INVALID);
    assert!(ctx.is_null());

    let bad = [0xffu8, 0];
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { qnlab_operator_from_json(bad.as_ptr().cast(), &mut op) }, QNLAB_ERR_UTF8);
    let zero = CString::new(r#"{"type":"jordan_nilpotent","n":0}"#).unwrap();
    assert_eq!(unsafe { qnlab_operator_from_json(zero.as_ptr(), &mut op) }, QNLAB_ERR_INVALID);
    assert!(op.is_null());

    // success clears the message
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { qnlab_shift_norm_bounds(1.0, 5.0, &mut lo, &mut hi) }, QNLAB_OK);
    assert!(qnlab_last_error_message().is_null());
    unsafe {
        qnlab_context_free(ptr::null_mut());
        qnlab_operator_free(ptr::null_mut());
        qnlab_string_free(ptr::null_mut());
    }
}

#[test]
fn run_command_reports() {
    let cmd = CString::new("verify-bounds").unwrap();
    let cfg = CString::new(
        r#"{"bounds":{"sandwich":[{"r":1,"t":20,"n":5}],"rotation":[],"monotone":[]}}"#,
    )
    .unwrap();
    let mut report = ptr::null_mut();
    let status = unsafe { qnlab_run_command(cmd.as_ptr(), cfg.as_ptr(), &mut report) };
    assert_eq!(status, QNLAB_ERR_VERIFY);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    unsafe { qnlab_string_free(report) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["failed"], 1);

    let cmd = CString::new("frobnicate").unwrap();
    let mut report = ptr::null_mut();
    let status = unsafe { qnlab_run_command(cmd.as_ptr(), cfg.as_ptr(), &mut report) };
    assert_eq!(status, QNLAB_ERR_INVALID);
    assert!(report.is_null());
}

#[test]
fn header_matches_exports() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qnlab.h"))
        .unwrap();
    for name in [
        "qnlab_last_error_message",
        "qnlab_version",
        "qnlab_context_new",
        "qnlab_context_free",
        "qnlab_operator_from_json",
        "qnlab_operator_free",
        "qnlab_operator_dim",
        "qnlab_resolvent_log_norm",
        "qnlab_estimate_k",
        "qnlab_shift_norm_bounds",
        "qnlab_run_command",
        "qnlab_string_free",
        "typedef struct QnlabContext QnlabContext",
        "#define QNLAB_ERR_PANIC -6",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C smoke program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libqnlab_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
