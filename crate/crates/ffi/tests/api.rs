use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qclock_ffi::*;

struct Handles {
    cavity: *mut QclockCavity,
    fields: *mut QclockFields,
}

impl Handles {
    fn new(l: f64, alpha: f64) -> Self {
        let mut h = Handles {
            cavity: ptr::null_mut(),
            fields: ptr::null_mut(),
        };
        unsafe {
            assert_eq!(qclock_cavity_new(l, alpha, &mut h.cavity), QclockStatus::Ok);
            assert_eq!(qclock_fields_new(1.0, 1.0, &mut h.fields), QclockStatus::Ok);
        }
        h
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            qclock_cavity_free(self.cavity);
            qclock_fields_free(self.fields);
        }
    }
}

fn empty() -> QclockResult {
    QclockResult {
        value: -1.0,
        error_estimate: -1.0,
        kind: QclockValueKind::Probability,
        regime: QclockRegime::Generic,
        evaluations: 0,
        converged: false,
        window_min: 0.0,
        window_max: 0.0,
    }
}

fn last_error() -> String {
    let p = qclock_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rates_match_the_library() {
    let h = Handles::new(1.0, 0.0);
    let mut r = empty();
    assert_eq!(unsafe { qclock_stationary_rate(h.cavity, h.fields, &mut r) }, QclockStatus::Ok);
    assert!((r.value - 0.028103438618244714).abs() < 1e-12);
    assert_eq!(r.kind, QclockValueKind::Rate);
    assert_eq!(r.regime, QclockRegime::LongTime);
    assert!(r.window_min.is_nan());

    let mut p = empty();
    let status = unsafe { qclock_stationary_probability(h.cavity, h.fields, 0.01, 0.0, 0.0, &mut p) };
    assert_eq!(status, QclockStatus::Ok);
    assert_eq!(p.kind, QclockValueKind::Probability);
    assert!(p.value > 0.0 && p.value < 1e-4);
}

#[test]
fn accelerated_entry_points() {
    let h = Handles::new(1.0, 0.02);
    let mut w = 0.0;
    assert_eq!(unsafe { qclock_cavity_mode_frequency(h.cavity, 1, &mut w) }, QclockStatus::Ok);
    let expected = std::f64::consts::PI * 0.02 / (2.0 * 0.01f64.atanh());
    assert!((w - expected).abs() < 1e-12);

    let mut avg = empty();
    assert_eq!(unsafe { qclock_averaged_rate(h.cavity, h.fields, 0.05, 64, &mut avg) }, QclockStatus::Ok);
    assert!(avg.window_min <= avg.value && avg.value <= avg.window_max);

    let mut dev = empty();
    assert_eq!(unsafe { qclock_clock_deviation(h.cavity, h.fields, 0.05, 64, &mut dev) }, QclockStatus::Ok);
    assert_eq!(dev.kind, QclockValueKind::Deviation);
    assert!((dev.value - 0.0673153813481373).abs() < 1e-8);

    let mut point = empty();
    assert_eq!(unsafe { qclock_clock_deviation(h.cavity, h.fields, 0.0, 0, &mut point) }, QclockStatus::Ok);
    assert!(point.window_min.is_nan());

    let mut rate = empty();
    assert_eq!(unsafe { qclock_accelerated_rate(h.cavity, h.fields, &mut rate) }, QclockStatus::Ok);
    assert!(((rate.value / 0.028103438618244714 - 1.0) - point.value).abs() < 1e-9);

    let mut p = empty();
    let status = unsafe { qclock_accelerated_probability(h.cavity, h.fields, 1.0, 0.0, 0.0, &mut p) };
    assert_eq!(status, QclockStatus::Ok);
    assert!(p.value > 0.0);
}

#[test]
fn special_functions() {
    let mut v = 0.0;
    assert_eq!(unsafe { qclock_gamma_abs_sq_imag(1.0, &mut v) }, QclockStatus::Ok);
    let pi = std::f64::consts::PI;
    assert!((v - pi / pi.sinh()).abs() < 1e-14);
    assert_eq!(unsafe { qclock_bessel_k_imag(1.0, 1.0, &mut v) }, QclockStatus::Ok);
    assert!((v - 0.289428037025992).abs() < 1e-12);
    assert_eq!(unsafe { qclock_bessel_k_imag(1.0, -1.0, &mut v) }, QclockStatus::InvalidArgument);
}

#[test]
fn validation_errors_leave_outputs_alone() {
    let mut cavity = ptr::null_mut();
    assert_eq!(unsafe { qclock_cavity_new(1.0, 2.0, &mut cavity) }, QclockStatus::InvalidArgument);
    assert!(cavity.is_null());
    assert!(last_error().contains("horizon"));

    let mut fields = ptr::null_mut();
    assert_eq!(unsafe { qclock_fields_new(-1.0, 1.0, &mut fields) }, QclockStatus::InvalidArgument);
    assert!(fields.is_null());

    let h = Handles::new(1.0, 0.0);
    let mut r = empty();
    let status = unsafe { qclock_stationary_probability(h.cavity, h.fields, 1.0, -1.0, 0.0, &mut r) };
    assert_eq!(status, QclockStatus::InvalidArgument);
    assert_eq!(r, empty());

    let mut w = 0.0;
    assert_eq!(unsafe { qclock_cavity_mode_frequency(h.cavity, 0, &mut w) }, QclockStatus::InvalidArgument);

    let moving = Handles::new(1.0, 0.5);
    let status = unsafe { qclock_averaged_rate(moving.cavity, moving.fields, 0.05, 2, &mut r) };
    assert_eq!(status, QclockStatus::InvalidArgument);
}

#[test]
fn null_pointers_are_reported() {
    let h = Handles::new(1.0, 0.0);
    let mut r = empty();
    assert_eq!(unsafe { qclock_stationary_rate(ptr::null(), h.fields, &mut r) }, QclockStatus::NullPointer);
    assert!(last_error().contains("cavity"));
    assert_eq!(unsafe { qclock_stationary_rate(h.cavity, ptr::null(), &mut r) }, QclockStatus::NullPointer);
    assert_eq!(
        unsafe { qclock_stationary_rate(h.cavity, h.fields, ptr::null_mut()) },
        QclockStatus::NullPointer
    );
    assert_eq!(unsafe { qclock_cavity_new(1.0, 0.0, ptr::null_mut()) }, QclockStatus::NullPointer);
    assert_eq!(unsafe { qclock_gamma_abs_sq_imag(1.0, ptr::null_mut()) }, QclockStatus::NullPointer);
    unsafe {
        qclock_cavity_free(ptr::null_mut());
        qclock_fields_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_per_thread() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { qclock_cavity_new(-1.0, 0.0, &mut c) }, QclockStatus::InvalidArgument);
    let other = std::thread::spawn(|| qclock_last_error_message().is_null()).join().unwrap();
    assert!(other);
    assert!(!last_error().is_empty());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qclock_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn static_library() -> Option<PathBuf> {
    // tests/<binary> sits in target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libqclock_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/qclock.h");
    assert!(header.exists(), "build.rs did not write {}", header.display());
    let lib = static_library().expect("static library next to the test binary");
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .expect("run cc");
    assert!(out.status.success(), "cc failed:\n{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains("0 failure(s)"));
}
