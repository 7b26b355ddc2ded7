//! C interface to `fixpoint`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `fp_*_free`. Every fallible function returns
//! an [`FpStatus`]; on failure a message is available from
//! [`fp_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` must be released with
//! [`fp_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fixpoint::cnf::{parse_dimacs, solve_dpll, write_dimacs, CnfFormula, VerdictTag};
use fixpoint::diagonal::{
    forge, parse_certificate, verify_certificate, DiagonalError, ForgeOptions,
    MisclassificationCertificate,
};
use fixpoint::goedel::{diagonalize, parse_formula};
use fixpoint::harness::{demo_minimal_report, diagonal_certificate_text};
use fixpoint::machine::{parse_assembly, run, serialize, Program, RunTag};
use fixpoint::tableau::encode;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    BoundNotFound = 5,
    VerifyFailed = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpRunTag {
    Accept = 0,
    Reject = 1,
    OutOfFuel = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpVerdict {
    Sat = 0,
    Unsat = 1,
}

pub struct FpProgram(Program);
pub struct FpFormula(CnfFormula);
pub struct FpCertificate(MisclassificationCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: FpStatus, msg: impl Into<String>) -> FpStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FpStatus) -> FpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(FpStatus::Panic, "internal panic"))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, FpStatus> {
    if s.is_null() {
        return Err(fail(FpStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(FpStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> FpStatus {
    if out.is_null() {
        return fail(FpStatus::NullArgument, "null output pointer");
    }
    *out = Box::into_raw(Box::new(value));
    FpStatus::Ok
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> FpStatus {
    if out.is_null() {
        return fail(FpStatus::NullArgument, "null output pointer");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FpStatus::Ok
        }
        Err(_) => fail(FpStatus::Invalid, "string contains NUL"),
    }
}

fn verdict(v: VerdictTag) -> FpVerdict {
    match v {
        VerdictTag::Sat => FpVerdict::Sat,
        VerdictTag::Unsat => FpVerdict::Unsat,
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fp_program_parse_asm(
    src: *const c_char,
    out: *mut *mut FpProgram,
) -> FpStatus {
    guard(|| {
        let src = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_assembly(src) {
            Ok(p) => emit(out, FpProgram(p)),
            Err(e) => fail(FpStatus::Parse, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn fp_program_free(p: *mut FpProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Length in bytes of the program's serialized image.
#[no_mangle]
pub unsafe extern "C" fn fp_program_image_len(p: *const FpProgram, out: *mut usize) -> FpStatus {
    guard(|| match (p.as_ref(), out.as_mut()) {
        (Some(p), Some(out)) => {
            *out = serialize(&p.0).len();
            FpStatus::Ok
        }
        _ => fail(FpStatus::NullArgument, "null argument"),
    })
}

/// Runs the program on `input[0..len]` for at most `fuel` steps.
#[no_mangle]
pub unsafe extern "C" fn fp_program_run(
    p: *const FpProgram,
    input: *const u8,
    len: usize,
    fuel: u64,
    tag: *mut FpRunTag,
    steps: *mut u64,
) -> FpStatus {
    guard(|| {
        let (Some(p), Some(tag), Some(steps)) = (p.as_ref(), tag.as_mut(), steps.as_mut()) else {
            return fail(FpStatus::NullArgument, "null argument");
        };
        if input.is_null() && len > 0 {
            return fail(FpStatus::NullArgument, "null input with nonzero length");
        }
        let bytes = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(input, len)
        };
        match run(&p.0, bytes, fuel) {
            Ok(r) => {
                *tag = match r.tag {
                    RunTag::Accept => FpRunTag::Accept,
                    RunTag::Reject => FpRunTag::Reject,
                    RunTag::OutOfFuel => FpRunTag::OutOfFuel,
                };
                *steps = r.steps_used;
                FpStatus::Ok
            }
            Err(e) => fail(FpStatus::Invalid, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn fp_formula_parse_dimacs(
    src: *const c_char,
    out: *mut *mut FpFormula,
) -> FpStatus {
    guard(|| {
        let src = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_dimacs(src) {
            Ok(f) => emit(out, FpFormula(f)),
            Err(e) => fail(FpStatus::Parse, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn fp_formula_free(f: *mut FpFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fp_formula_counts(
    f: *const FpFormula,
    num_vars: *mut u32,
    num_clauses: *mut usize,
) -> FpStatus {
    guard(
        || match (f.as_ref(), num_vars.as_mut(), num_clauses.as_mut()) {
            (Some(f), Some(v), Some(c)) => {
                *v = f.0.num_vars();
                *c = f.0.num_clauses();
                FpStatus::Ok
            }
            _ => fail(FpStatus::NullArgument, "null argument"),
        },
    )
}

#[no_mangle]
pub unsafe extern "C" fn fp_formula_to_dimacs(
    f: *const FpFormula,
    out: *mut *mut c_char,
) -> FpStatus {
    guard(|| match f.as_ref() {
        Some(f) => emit_string(out, write_dimacs(&f.0)),
        None => fail(FpStatus::NullArgument, "null formula"),
    })
}

/// Decides the formula with the built-in DPLL solver.
#[no_mangle]
pub unsafe extern "C" fn fp_formula_solve(f: *const FpFormula, out: *mut FpVerdict) -> FpStatus {
    guard(|| match (f.as_ref(), out.as_mut()) {
        (Some(f), Some(out)) => {
            *out = verdict(solve_dpll(&f.0).tag());
            FpStatus::Ok
        }
        _ => fail(FpStatus::NullArgument, "null argument"),
    })
}

/// The formula satisfiable iff the program accepts within `t` steps.
#[no_mangle]
pub unsafe extern "C" fn fp_tableau_encode(
    p: *const FpProgram,
    t: usize,
    out: *mut *mut FpFormula,
) -> FpStatus {
    guard(|| match p.as_ref() {
        Some(p) => match encode(&p.0, &[], t) {
            Ok((f, _)) => emit(out, FpFormula(f)),
            Err(e) => fail(FpStatus::Invalid, e.to_string()),
        },
        None => fail(FpStatus::NullArgument, "null program"),
    })
}

/// Forges a certificate for `classifier`, searching bounds up to `t_cap`.
/// Returns [`FpStatus::BoundNotFound`] when no bound works.
#[no_mangle]
pub unsafe extern "C" fn fp_forge(
    classifier: *const FpProgram,
    t_cap: usize,
    out: *mut *mut FpCertificate,
) -> FpStatus {
    guard(|| match classifier.as_ref() {
        Some(c) => match forge(&c.0, ForgeOptions::with_cap(t_cap)) {
            Ok(cert) => emit(out, FpCertificate(cert)),
            Err(e @ DiagonalError::BoundNotFound { .. }) => {
                fail(FpStatus::BoundNotFound, e.to_string())
            }
            Err(e) => fail(FpStatus::Invalid, e.to_string()),
        },
        None => fail(FpStatus::NullArgument, "null classifier"),
    })
}

#[no_mangle]
pub unsafe extern "C" fn fp_certificate_free(c: *mut FpCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fp_certificate_parse(
    src: *const c_char,
    out: *mut *mut FpCertificate,
) -> FpStatus {
    guard(|| {
        let src = match text(src) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_certificate(src) {
            Ok(c) => emit(out, FpCertificate(c)),
            Err(e) => fail(FpStatus::Parse, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn fp_certificate_to_text(
    c: *const FpCertificate,
    out: *mut *mut c_char,
) -> FpStatus {
    guard(|| match c.as_ref() {
        Some(c) => emit_string(out, c.0.to_text()),
        None => fail(FpStatus::NullArgument, "null certificate"),
    })
}

/// [`FpStatus::Ok`] if every check passes, else [`FpStatus::VerifyFailed`]
/// with the failing check in the error message.
#[no_mangle]
pub unsafe extern "C" fn fp_certificate_verify(c: *const FpCertificate) -> FpStatus {
    guard(|| match c.as_ref() {
        Some(c) => match verify_certificate(&c.0) {
            Ok(()) => FpStatus::Ok,
            Err(f) => fail(FpStatus::VerifyFailed, f.to_string()),
        },
        None => fail(FpStatus::NullArgument, "null certificate"),
    })
}

#[no_mangle]
pub unsafe extern "C" fn fp_certificate_verdicts(
    c: *const FpCertificate,
    classifier: *mut FpVerdict,
    oracle: *mut FpVerdict,
) -> FpStatus {
    guard(
        || match (c.as_ref(), classifier.as_mut(), oracle.as_mut()) {
            (Some(c), Some(cl), Some(or)) => {
                *cl = verdict(c.0.classifier_verdict);
                *or = verdict(c.0.oracle_verdict.tag());
                FpStatus::Ok
            }
            _ => fail(FpStatus::NullArgument, "null argument"),
        },
    )
}

/// Case analysis over the `k`-formula self-describing space. `all_fail`
/// receives 1 when every table misclassifies the fixed point.
#[no_mangle]
pub unsafe extern "C" fn fp_demo_minimal(
    k: u32,
    report: *mut *mut c_char,
    all_fail: *mut i32,
) -> FpStatus {
    guard(|| {
        if !(2..=12).contains(&k) {
            return fail(FpStatus::Invalid, "space size must be in 2..=12");
        }
        let Some(all_fail) = all_fail.as_mut() else {
            return fail(FpStatus::NullArgument, "null argument");
        };
        let (text, ok) = demo_minimal_report(k as usize);
        *all_fail = i32::from(ok);
        emit_string(report, text)
    })
}

/// Diagonalizes `theta` (text syntax) and returns the certificate report.
#[no_mangle]
pub unsafe extern "C" fn fp_goedel_diagonalize(
    theta: *const c_char,
    report: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        let src = match text(theta) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_formula(src) {
            Err(e) => fail(FpStatus::Parse, e.to_string()),
            Ok(f) => match diagonalize(&f) {
                Ok(c) if c.check() => emit_string(report, diagonal_certificate_text(&c)),
                Ok(_) => fail(
                    FpStatus::VerifyFailed,
                    "diagonal certificate failed its check",
                ),
                Err(e) => fail(FpStatus::Invalid, e.to_string()),
            },
        }
    })
}
