//! Brute-force reference evaluations.
//!
//! These share no code path with the production routines and are used by
//! `qclock verify` and by the test suites as independent oracles.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `K_{i nu}(x)` by a fixed-step trapezoid sum of the integral
/// representation along the straight line `Im t = theta`.
///
/// With `theta = 0` this is `int_0^inf exp(-x cosh t) cos(nu t) dt` itself.
/// Lifting the line toward the saddle keeps the sum from cancelling to
/// nothing when `nu > x`; the trapezoid rule converges geometrically for this
/// analytic, doubly-exponentially decaying integrand.
pub fn bessel_k_imag_trapezoid(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    let theta = if nu == 0.0 {
        0.0
    } else {
        let cap = FRAC_PI_2 - (2.0 / nu).min(1.0);
        (nu / x).min(1.0).asin().min(cap)
    };
    let (sin_t, cos_t) = theta.sin_cos();
    // Truncate once the envelope has dropped by exp(-60).
    let mut end: f64 = 1.0;
    while x * cos_t * (end.cosh() - 1.0) < 60.0 {
        end += 0.25;
    }
    let rate = nu + x * end.cosh();
    // about 0.6 rad of phase per step; the error is at the 1e-13 level from 0.3 to 1.5
    let h = (0.6 / rate).min(2e-3);
    let n = (end / h).ceil() as usize;
    let h = end / n as f64;
    let f = |s: f64| {
        (-x * s.cosh() * cos_t - nu * theta).exp() * (nu * s - x * s.sinh() * sin_t).cos()
    };
    h * compensated_sum((0..=n).map(|k| {
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        w * f(k as f64 * h)
    }))
}

/// Real-axis trapezoid of `int_0^upper exp(-x cosh t) cos(nu t) dt`.
pub fn bessel_k_imag_real_axis(nu: f64, x: f64, upper: f64, steps: usize) -> f64 {
    let h = upper / steps as f64;
    let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cos();
    h * compensated_sum((0..=steps).map(|k| {
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        w * f(k as f64 * h)
    }))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` by the Lanczos approximation, `Re z >= 0.5`.
pub fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `|Gamma(iy)|^2 = |Gamma(1 + iy)|^2 / y^2` through the Lanczos gamma.
pub fn gamma_abs_sq_imag_lanczos(y: f64) -> f64 {
    let ln_mod = ln_gamma_lanczos(Complex64::new(1.0, y)).re;
    (2.0 * ln_mod).exp() / (y * y)
}

/// Trapezoid sum of `f` on `[a, b]` with `n` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    h * compensated_sum((0..=n).map(|k| {
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        w * f(a + k as f64 * h)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_k0() {
        assert!((bessel_k_imag_trapezoid(0.0, 1.0) - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((bessel_k_imag_real_axis(0.0, 1.0, 40.0, 400_000) - 0.421_024_438_240_708_3).abs() < 1e-13);
    }

    #[test]
    fn lifted_line_agrees_with_real_axis_where_both_work() {
        for (nu, x) in [(1.0, 1.0), (0.5, 3.0), (2.0, 5.0)] {
            let a = bessel_k_imag_trapezoid(nu, x);
            let b = bessel_k_imag_real_axis(nu, x, 40.0, 400_000);
            assert!((a - b).abs() < 1e-12 * a.abs(), "nu={nu} x={x}");
        }
    }

    #[test]
    fn lanczos_reference_points() {
        // Gamma(1/2) = sqrt(pi), Gamma(6) = 120
        assert!((ln_gamma_lanczos(Complex64::new(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma_lanczos(Complex64::new(6.0, 0.0)).re - 120f64.ln()).abs() < 1e-13);
    }
}
