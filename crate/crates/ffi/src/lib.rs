//! C ABI for `qclock`.
//!
//! Every entry point returns a [`QclockStatus`] and writes its result through
//! an out-pointer, which is left untouched on failure. The message for the
//! most recent failure on the calling thread is available from
//! [`qclock_last_error_message`]. Panics never cross the boundary.
//!
//! # Safety
//!
//! Handle arguments must be null or come from the matching `_new` function
//! and not yet be freed. Out-pointers must be null or valid for writes.
//! Null pointers are reported as [`QclockStatus::NullPointer`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qclock::accelerated::{
    averaged_decay_rate, decay_probability_accelerated, decay_rate_accelerated_longtime, ideal_clock_deviation,
    pointwise_clock_deviation, AveragingWindow,
};
use qclock::kinematics::{cavity_geometry, CavityGeometry};
use qclock::quadrature::QuadratureConfig;
use qclock::specialfn::{bessel_k_imag_order, gamma_abs_sq_imag};
use qclock::stationary::{
    decay_probability_stationary, decay_rate_stationary_longtime, DecayResult, FieldParams, Regime, ValueKind,
};
use qclock::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QclockStatus {
    Ok = 0,
    /// Arguments outside the model's domain (bad parameters, horizon
    /// crossing, threshold, tolerances).
    InvalidArgument = 1,
    /// The computation itself failed (non-finite values, lost precision).
    Numerical = 2,
    NullPointer = 3,
    /// A bug inside the library; the message holds the panic payload.
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QclockValueKind {
    Probability = 0,
    Rate = 1,
    Deviation = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QclockRegime {
    ShortTime = 0,
    Generic = 1,
    LongTime = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QclockResult {
    pub value: f64,
    pub error_estimate: f64,
    pub kind: QclockValueKind,
    pub regime: QclockRegime,
    pub evaluations: u64,
    pub converged: bool,
    /// Smallest and largest pointwise rate in an averaging window; NaN when
    /// no averaging took place.
    pub window_min: f64,
    pub window_max: f64,
}

impl From<DecayResult> for QclockResult {
    fn from(r: DecayResult) -> Self {
        Self {
            value: r.value,
            error_estimate: r.error_estimate,
            kind: match r.kind {
                ValueKind::Probability => QclockValueKind::Probability,
                ValueKind::Rate => QclockValueKind::Rate,
                ValueKind::Deviation => QclockValueKind::Deviation,
            },
            regime: match r.regime {
                Regime::ShortTime => QclockRegime::ShortTime,
                Regime::Generic => QclockRegime::Generic,
                Regime::LongTime => QclockRegime::LongTime,
            },
            evaluations: r.diagnostics.evaluations as u64,
            converged: r.diagnostics.converged,
            window_min: r.diagnostics.window_min.unwrap_or(f64::NAN),
            window_max: r.diagnostics.window_max.unwrap_or(f64::NAN),
        }
    }
}

/// Cavity of proper length `l` with trailing-wall acceleration `alpha`.
pub struct QclockCavity(CavityGeometry);

/// Detector gap `mass` and coupling `lambda`.
pub struct QclockFields(FieldParams);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
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

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> QclockStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QclockStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed as `{name}`"));
            QclockStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            if e.is_validation() {
                QclockStatus::InvalidArgument
            } else {
                QclockStatus::Numerical
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            QclockStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

fn check_out<T>(p: *mut T, name: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::Null(name))
    } else {
        Ok(())
    }
}

fn tolerances(rel_tol: f64, abs_tol: f64) -> Result<QuadratureConfig, Error> {
    let pick = |v: f64, default: f64| if v == 0.0 { default } else { v };
    let cfg = QuadratureConfig::with_tolerances(
        pick(rel_tol, QuadratureConfig::DEFAULT_REL_TOL),
        pick(abs_tol, QuadratureConfig::DEFAULT_ABS_TOL),
    );
    cfg.validate()?;
    Ok(cfg)
}

fn window(cavity: &CavityGeometry, relative_halfwidth: f64, samples: u32) -> Result<AveragingWindow, Error> {
    let w = AveragingWindow {
        center_alpha: cavity.alpha,
        relative_halfwidth,
        samples: samples as usize,
    };
    w.validate()?;
    Ok(w)
}

unsafe fn write_result(
    out: *mut QclockResult,
    f: impl FnOnce() -> Result<DecayResult, Error>,
) -> Result<(), Failure> {
    check_out(out, "out")?;
    let r = f()?;
    out.write(r.into());
    Ok(())
}

/// Message of the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qclock_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qclock_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `alpha = 0` is a cavity at rest; `alpha * l` must stay below 2.
#[no_mangle]
pub unsafe extern "C" fn qclock_cavity_new(l: f64, alpha: f64, out: *mut *mut QclockCavity) -> QclockStatus {
    guard(|| {
        check_out(out, "out")?;
        let g = cavity_geometry(l, alpha)?;
        out.write(Box::into_raw(Box::new(QclockCavity(g))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qclock_cavity_free(cavity: *mut QclockCavity) {
    if !cavity.is_null() {
        drop(Box::from_raw(cavity));
    }
}

/// Frequency of mode `n` (proper frequency at the trailing wall when
/// accelerated).
#[no_mangle]
pub unsafe extern "C" fn qclock_cavity_mode_frequency(
    cavity: *const QclockCavity,
    n: u32,
    out: *mut f64,
) -> QclockStatus {
    guard(|| {
        let c = get(cavity, "cavity")?;
        check_out(out, "out")?;
        if n == 0 {
            return Err(Error::Domain("mode index must be at least 1".into()).into());
        }
        out.write(c.0.mode_frequency(n));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qclock_fields_new(mass: f64, lambda: f64, out: *mut *mut QclockFields) -> QclockStatus {
    guard(|| {
        check_out(out, "out")?;
        let f = FieldParams::new(mass, lambda)?;
        out.write(Box::into_raw(Box::new(QclockFields(f))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qclock_fields_free(fields: *mut QclockFields) {
    if !fields.is_null() {
        drop(Box::from_raw(fields));
    }
}

/// Decay probability after coordinate time `t` in a resting cavity.
/// A tolerance of 0 selects the library default.
#[no_mangle]
pub unsafe extern "C" fn qclock_stationary_probability(
    cavity: *const QclockCavity,
    fields: *const QclockFields,
    t: f64,
    rel_tol: f64,
    abs_tol: f64,
    out: *mut QclockResult,
) -> QclockStatus {
    guard(|| {
        let (c, f) = (get(cavity, "cavity")?, get(fields, "fields")?);
        write_result(out, || decay_probability_stationary(&c.0, &f.0, t, &tolerances(rel_tol, abs_tol)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn qclock_stationary_rate(
    cavity: *const QclockCavity,
    fields: *const QclockFields,
    out: *mut QclockResult,
) -> QclockStatus {
    guard(|| {
        let (c, f) = (get(cavity, "cavity")?, get(fields, "fields")?);
        write_result(out, || decay_rate_stationary_longtime(&c.0, &f.0))
    })
}

/// Decay probability after proper time `tau` of the trailing wall.
/// A tolerance of 0 selects the library default.
#[no_mangle]
pub unsafe extern "C" fn qclock_accelerated_probability(
    cavity: *const QclockCavity,
    fields: *const QclockFields,
    tau: f64,
    rel_tol: f64,
    abs_tol: f64,
    out: *mut QclockResult,
) -> QclockStatus {
    guard(|| {
        let (c, f) = (get(cavity, "cavity")?, get(fields, "fields")?);
        write_result(out, || decay_probability_accelerated(&c.0, &f.0, tau, &tolerances(rel_tol, abs_tol)?))
    })
}

/// Long-time rate at the cavity's own acceleration, without averaging.
#[no_mangle]
pub unsafe extern "C" fn qclock_accelerated_rate(
    cavity: *const QclockCavity,
    fields: *const QclockFields,
    out: *mut QclockResult,
) -> QclockStatus {
    guard(|| {
        let (c, f) = (get(cavity, "cavity")?, get(fields, "fields")?);
        write_result(out, || decay_rate_accelerated_longtime(&c.0, &f.0))
    })
}

/// Long-time rate averaged over `alpha * (1 +- relative_halfwidth)` with
/// `samples` points, centred on the cavity's acceleration.
#[no_mangle]
pub unsafe extern "C" fn qclock_averaged_rate(
    cavity: *const QclockCavity,
    fields: *const QclockFields,
    relative_halfwidth: f64,
    samples: u32,
    out: *mut QclockResult,
) -> QclockStatus {
    guard(|| {
        let (c, f) = (get(cavity, "cavity")?, get(fields, "fields")?);
        write_result(out, || averaged_decay_rate(&c.0, &f.0, &window(&c.0, relative_halfwidth, samples)?))
    })
}

/// Relative deviation of the averaged rate from the resting rate of a cavity
/// of the same length. `relative_halfwidth = 0` compares the pointwise rate.
#[no_mangle]
pub unsafe extern "C" fn qclock_clock_deviation(
    cavity: *const QclockCavity,
    fields: *const QclockFields,
    relative_halfwidth: f64,
    samples: u32,
    out: *mut QclockResult,
) -> QclockStatus {
    guard(|| {
        let (c, f) = (get(cavity, "cavity")?, get(fields, "fields")?);
        write_result(out, || {
            if relative_halfwidth == 0.0 {
                pointwise_clock_deviation(&c.0, &f.0)
            } else {
                ideal_clock_deviation(&c.0, &f.0, &window(&c.0, relative_halfwidth, samples)?)
            }
        })
    })
}

/// `|Gamma(i y)|^2 = pi / (y sinh(pi y))`.
#[no_mangle]
pub unsafe extern "C" fn qclock_gamma_abs_sq_imag(y: f64, out: *mut f64) -> QclockStatus {
    guard(|| {
        check_out(out, "out")?;
        out.write(gamma_abs_sq_imag(y).map_err(Error::from)?.value);
        Ok(())
    })
}

/// Modified Bessel function `K_{i nu}(x)` for real `nu >= 0`, `x > 0`.
#[no_mangle]
pub unsafe extern "C" fn qclock_bessel_k_imag(nu: f64, x: f64, out: *mut f64) -> QclockStatus {
    guard(|| {
        check_out(out, "out")?;
        out.write(bessel_k_imag_order(nu, x).map_err(Error::from)?.value);
        Ok(())
    })
}
