//! Special functions for the decay integrals.

mod bessel;
mod gamma;

use thiserror::Error;

pub use bessel::{
    bessel_k_imag_order, bessel_k_imag_order_scaled, bessel_k_imag_order_with, bessel_k_imag_scaled,
    bessel_k_imag_scaled_with, ln_bessel_k_imag_order, BesselEvalMethod, BesselValue, LogBessel,
    ScaledBessel,
};
pub use gamma::{gamma_abs_sq_imag, ln_gamma, ln_gamma_abs_sq_imag, ln_sinh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error in {function}: {detail}")]
    Range {
        function: &'static str,
        detail: String,
    },
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

/// `sin^2(x t / 2) / x^2`, equal to `t^2 / 4` at `x = 0`.
pub fn resonance_kernel(x: f64, t: f64) -> f64 {
    let u = 0.5 * x * t;
    if u.abs() < 1e-4 {
        // sin(u)/u = 1 - u^2/6 + u^4/120
        let u2 = u * u;
        let sinc = 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0);
        0.25 * t * t * sinc * sinc
    } else {
        let s = u.sin() / x;
        s * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn kernel_examples() {
        assert_eq!(resonance_kernel(0.0, 2.0), 1.0);
        assert!((resonance_kernel(PI, 1.0) - 1.0 / (PI * PI)).abs() < 1e-16);
        assert!((resonance_kernel(1e-9, 2.0) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn kernel_bounded_by_peak(x in -1e3f64..1e3, t in 0.0f64..1e3) {
            let k = resonance_kernel(x, t);
            prop_assert!(k >= 0.0);
            prop_assert!(k <= 0.25 * t * t * (1.0 + 1e-14));
        }

        #[test]
        fn kernel_continuous_through_switch(t in 0.1f64..100.0) {
            let x = 2e-4 / t;
            let below = resonance_kernel(x * 0.999_999, t);
            let above = resonance_kernel(x * 1.000_001, t);
            prop_assert!((below - above).abs() <= 1e-9 * above);
        }
    }
}
