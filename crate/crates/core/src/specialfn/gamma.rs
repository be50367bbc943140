use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Estimate, SpecialFnError};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;

// B_{2k} / (2k (2k - 1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Gamma(z)` for `Re z > 0`, continuous along lines of constant real part.
///
/// Stirling series after shifting `z` until `|z| >= 15`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + series - shift
}

/// `ln sinh(x)` for `x > 0` without overflow.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln |Gamma(iy)|^2 = ln pi - ln y - ln sinh(pi y)`.
pub fn ln_gamma_abs_sq_imag(y: f64) -> Result<f64, SpecialFnError> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(SpecialFnError::Domain(format!(
            "|Gamma(iy)|^2 needs y > 0, got {y}"
        )));
    }
    Ok(PI.ln() - y.ln() - ln_sinh(PI * y))
}

/// `|Gamma(iy)|^2 = pi / (y sinh(pi y))`.
pub fn gamma_abs_sq_imag(y: f64) -> Result<Estimate, SpecialFnError> {
    let ln_value = ln_gamma_abs_sq_imag(y)?;
    if PI * y > f64::MAX.ln() + std::f64::consts::LN_2 {
        return Err(SpecialFnError::Range {
            function: "gamma_abs_sq_imag",
            detail: format!("sinh(pi y) overflows at y = {y}; use ln_gamma_abs_sq_imag"),
        });
    }
    let value = ln_value.exp();
    Ok(Estimate {
        value,
        abs_error: 4.0 * f64::EPSILON * value * (1.0 + PI * y),
    })
}
