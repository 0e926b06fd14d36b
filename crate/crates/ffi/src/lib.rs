//! C ABI over `expsum`.
//!
//! Sequences are passed as opaque `ExpsumSequence` handles. Every fallible
//! function returns an `ExpsumStatus`; on failure a message is kept per thread
//! and can be read with `expsum_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use expsum::extremal::{
    extremal_half, extremal_sequence, refute_false_bound, OddFraction, RefuteScope,
};
use expsum::{
    bound_ladder, bound_report, check_admissible, exp_sum, refined_bound, Error, PhaseSequence,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpsumStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NotAdmissible = 3,
    Degenerate = 4,
    TooShort = 5,
    Parse = 6,
    NoCounterexample = 7,
    BufferTooSmall = 8,
    Internal = 99,
}

/// Opaque phase sequence.
pub struct ExpsumSequence {
    inner: PhaseSequence,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpsumAdmissibility {
    pub admissible: bool,
    pub monotone: bool,
    pub theta_star: f64,
    /// 1-based index of the first decreasing gap pair, 0 when none.
    pub first_violation: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpsumBoundLadder {
    pub theta: f64,
    pub bound_landau: f64,
    pub bound_kuzmin: f64,
    pub bound_simple: f64,
    pub bound_two_over_pi_theta: f64,
    pub bound_false: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ExpsumStatus {
    match e {
        Error::InvalidParameter(_)
        | Error::InvalidSequence(_)
        | Error::InvalidFraction(_)
        | Error::InvalidInterval { .. } => ExpsumStatus::InvalidParameter,
        Error::NotAdmissible { .. } | Error::NonMonotoneGaps { .. } => ExpsumStatus::NotAdmissible,
        Error::DegenerateTriple { .. } | Error::DegenerateGap { .. } => ExpsumStatus::Degenerate,
        Error::TooShort { .. } => ExpsumStatus::TooShort,
        Error::Parse(_) => ExpsumStatus::Parse,
        Error::NoCounterexample(_) => ExpsumStatus::NoCounterexample,
        Error::Io(_) => ExpsumStatus::Internal,
    }
}

/// Runs `f`, recording errors and turning panics into `Internal`.
fn guard<F>(f: F) -> ExpsumStatus
where
    F: FnOnce() -> Result<(), (ExpsumStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ExpsumStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            ExpsumStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (ExpsumStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (ExpsumStatus, String) {
    (ExpsumStatus::NullPointer, format!("{name} is null"))
}

unsafe fn seq_ref<'a>(
    p: *const ExpsumSequence,
) -> Result<&'a PhaseSequence, (ExpsumStatus, String)> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("sequence"))
}

fn boxed(inner: PhaseSequence) -> *mut ExpsumSequence {
    Box::into_raw(Box::new(ExpsumSequence { inner }))
}

/// Message for the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn expsum_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `phases` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_sequence_new(
    phases: *const f64,
    n: usize,
    out: *mut *mut ExpsumSequence,
) -> ExpsumStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if phases.is_null() && n > 0 {
            return Err(null("phases"));
        }
        let v = if n == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(phases, n).to_vec()
        };
        let s = PhaseSequence::new(v).map_err(lib_err)?;
        *out = boxed(s);
        Ok(())
    })
}

/// # Safety
/// `seq` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn expsum_sequence_free(seq: *mut ExpsumSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Number of phases, 0 for NULL.
///
/// # Safety
/// `seq` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn expsum_sequence_len(seq: *const ExpsumSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies the phases into `buf`. Fails with `BUFFER_TOO_SMALL` when `cap` is
/// less than the length, which is always written to `len_out` when non-NULL.
///
/// # Safety
/// `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn expsum_sequence_phases(
    seq: *const ExpsumSequence,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> ExpsumStatus {
    guard(|| {
        let s = seq_ref(seq)?;
        let p = s.phases();
        if !len_out.is_null() {
            *len_out = p.len();
        }
        if cap < p.len() {
            return Err((
                ExpsumStatus::BufferTooSmall,
                format!("buffer holds {cap} values, need {}", p.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(p.as_ptr(), buf, p.len());
        Ok(())
    })
}

/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_exp_sum(
    seq: *const ExpsumSequence,
    re: *mut f64,
    im: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        let s = seq_ref(seq)?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let z = exp_sum(s);
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_check_admissible(
    seq: *const ExpsumSequence,
    theta: f64,
    out: *mut ExpsumAdmissibility,
) -> ExpsumStatus {
    guard(|| {
        let s = seq_ref(seq)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = check_admissible(s, theta).map_err(lib_err)?;
        *out = ExpsumAdmissibility {
            admissible: r.admissible,
            monotone: r.monotone,
            theta_star: r.theta_star,
            first_violation: r.first_violation.unwrap_or(0),
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_bound_ladder(
    theta: f64,
    out: *mut ExpsumBoundLadder,
) -> ExpsumStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let l = bound_ladder(theta).map_err(lib_err)?;
        *out = ExpsumBoundLadder {
            theta: l.theta,
            bound_landau: l.bound_landau,
            bound_kuzmin: l.bound_kuzmin,
            bound_simple: l.bound_simple,
            bound_two_over_pi_theta: l.bound_two_over_pi_theta,
            bound_false: l.bound_false,
        };
        Ok(())
    })
}

/// Bound report as a JSON string; release it with `expsum_string_free`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_bound_report_json(
    seq: *const ExpsumSequence,
    theta: f64,
    out: *mut *mut c_char,
) -> ExpsumStatus {
    guard(|| {
        let s = seq_ref(seq)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = bound_report(s, theta).map_err(lib_err)?;
        let json =
            serde_json::to_string(&r).map_err(|e| (ExpsumStatus::Internal, e.to_string()))?;
        *out = CString::new(json)
            .map_err(|e| (ExpsumStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn expsum_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Attaining sequence for `theta = p/q` with `p`, `q` odd; `p = 1, q = 2`
/// gives the half-turn witness.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_extremal(
    p: u64,
    q: u64,
    out: *mut *mut ExpsumSequence,
) -> ExpsumStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let w = if p == 1 && q == 2 {
            extremal_half()
        } else {
            extremal_sequence(OddFraction::new(p, q).map_err(lib_err)?).map_err(lib_err)?
        };
        *out = boxed(w.sequence);
        Ok(())
    })
}

/// Like `expsum_extremal`, with the fraction given as text such as `"7/23"`.
///
/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn expsum_extremal_str(
    text: *const c_char,
    out: *mut *mut ExpsumSequence,
) -> ExpsumStatus {
    if text.is_null() {
        set_last_error("text is null".into());
        return ExpsumStatus::NullPointer;
    }
    let parsed = CStr::from_ptr(text)
        .to_str()
        .map_err(|e| e.to_string())
        .and_then(|t| {
            if t.trim() == "1/2" {
                Ok((1, 2))
            } else {
                t.parse::<OddFraction>()
                    .map(|f| (f.numerator(), f.denominator()))
                    .map_err(|e| e.to_string())
            }
        });
    match parsed {
        Ok((p, q)) => expsum_extremal(p, q, out),
        Err(msg) => {
            set_last_error(msg);
            ExpsumStatus::Parse
        }
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_refined_bound(
    seq: *const ExpsumSequence,
    out: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        let s = seq_ref(seq)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = refined_bound(s).map_err(lib_err)?;
        Ok(())
    })
}

/// Sequence admissible for `theta` whose sum exceeds `1/(pi theta) + 1`.
/// `search_below` also accepts witnesses built for a smaller theta.
///
/// # Safety
/// `witness` and `margin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn expsum_refute(
    theta: f64,
    search_below: bool,
    witness: *mut *mut ExpsumSequence,
    margin: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        if witness.is_null() || margin.is_null() {
            return Err(null("output"));
        }
        let scope = if search_below {
            RefuteScope::AtOrBelow
        } else {
            RefuteScope::AtTheta
        };
        let r = refute_false_bound(theta, scope).map_err(lib_err)?;
        *margin = r.margin;
        *witness = boxed(r.witness.sequence);
        Ok(())
    })
}
