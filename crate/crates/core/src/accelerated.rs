//! Decay of the uniformly accelerated cavity clock.
//!
//! With `nu = Omega / alpha` and the wall overlap
//! `S(Omega) = int_{xi_-}^{xi_+} K_{i nu}((M/alpha) e^{alpha xi}) sin(omega_1 (xi - xi_-)) dxi`,
//! the decay probability is
//!
//! ```text
//! P(tau) = (4 lambda^2 / pi^2) int_0^inf dOmega / Omega |Gamma(i nu)|^-2 S^2
//!          [kern(Omega - w1) + n (kern(Omega - w1) + kern(Omega + w1))]
//! ```
//!
//! with the thermal weight `n = 1 / (exp(2 pi nu) - 1)`. Substituting
//! `|Gamma(i nu)|^-2 = nu sinh(pi nu) / pi` and `S~ = exp(pi nu / 2) S`,
//! the exponentially large and small factors cancel in closed form:
//!
//! ```text
//! P(tau) = (2 lambda^2 / (pi^3 alpha)) int_0^inf S~^2 [kern(Omega - w1) + exp(-2 pi nu) kern(Omega + w1)] dOmega
//! ```
//!
//! `S~` is of order one wherever the Bessel function oscillates, so nothing
//! here overflows even for very small `alpha`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::kinematics::{cavity_geometry, CavityGeometry};
use crate::quadrature::{integrate, integrate_resonant, QuadratureConfig, Resonance};
use crate::specialfn::{bessel_k_imag_scaled, ln_bessel_k_imag_order, ln_gamma, ln_gamma_abs_sq_imag, resonance_kernel};
use crate::stationary::{decay_rate_stationary_longtime, DecayResult, Diagnostics, FieldParams, Regime, ValueKind};

/// Two-mode squeezing between the Minkowski vacuum and Rindler modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingFactor {
    pub omega: f64,
    pub alpha: f64,
    /// `tanh r = exp(-pi Omega / alpha)`.
    pub r: f64,
    /// `sinh^2 r = 1 / (exp(2 pi Omega / alpha) - 1)`.
    pub thermal_weight: f64,
}

impl SqueezingFactor {
    pub fn new(omega: f64, alpha: f64) -> Result<Self, Error> {
        if !(omega > 0.0) || !(alpha > 0.0) {
            return Err(Error::Domain(format!(
                "squeezing needs Omega > 0 and alpha > 0, got Omega = {omega}, alpha = {alpha}"
            )));
        }
        let x = PI * omega / alpha;
        Ok(Self {
            omega,
            alpha,
            r: (-x).exp().atanh(),
            thermal_weight: 1.0 / (2.0 * x).exp_m1(),
        })
    }
}

/// Uniform average over `alpha (1 - delta) ..= alpha (1 + delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingWindow {
    pub center_alpha: f64,
    pub relative_halfwidth: f64,
    pub samples: usize,
}

impl AveragingWindow {
    pub const DEFAULT_RELATIVE_HALFWIDTH: f64 = 0.05;
    pub const DEFAULT_SAMPLES: usize = 64;
    pub const MIN_SAMPLES: usize = 8;

    pub fn new(center_alpha: f64) -> Self {
        Self {
            center_alpha,
            relative_halfwidth: Self::DEFAULT_RELATIVE_HALFWIDTH,
            samples: Self::DEFAULT_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.center_alpha > 0.0) || !self.center_alpha.is_finite() {
            return Err(Error::Domain(format!(
                "averaging window needs alpha > 0, got {}",
                self.center_alpha
            )));
        }
        if !(self.relative_halfwidth > 0.0 && self.relative_halfwidth < 1.0) {
            return Err(Error::Domain(format!(
                "relative halfwidth must lie in (0, 1), got {}",
                self.relative_halfwidth
            )));
        }
        if self.samples < Self::MIN_SAMPLES {
            return Err(Error::Domain(format!(
                "averaging needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                self.samples
            )));
        }
        Ok(())
    }

    /// Equally spaced sample points, both window edges included.
    pub fn alphas(&self) -> Vec<f64> {
        let lo = self.center_alpha * (1.0 - self.relative_halfwidth);
        let span = 2.0 * self.center_alpha * self.relative_halfwidth;
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(|j| lo + span * j as f64 / last).collect()
    }
}

fn check_mode_args(omega: f64, mass: f64, alpha: f64) -> Result<(), Error> {
    if !(omega > 0.0) || !(alpha > 0.0) || !(mass > 0.0) {
        return Err(Error::Domain(format!(
            "Rindler mode needs Omega, M, alpha > 0, got Omega = {omega}, M = {mass}, alpha = {alpha}"
        )));
    }
    Ok(())
}

/// Spatial Rindler mode `F_Omega(xi)` of the massive field.
pub fn rindler_mode_spatial(omega: f64, xi: f64, mass: f64, alpha: f64) -> Result<Complex64, Error> {
    check_mode_args(omega, mass, alpha)?;
    let nu = omega / alpha;
    let k = ln_bessel_k_imag_order(nu, mass / alpha * (alpha * xi).exp())?;
    if k.sign == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ln_mod = -0.5 * (PI * omega).ln() - 0.5 * ln_gamma_abs_sq_imag(nu)? + k.ln_abs;
    if ln_mod > f64::MAX.ln() {
        return Err(Error::SpecialFn(crate::specialfn::SpecialFnError::Range {
            function: "rindler_mode_spatial",
            detail: format!("|F| ~ exp({ln_mod:.1}) overflows"),
        }));
    }
    // arg Gamma(i nu) = arg Gamma(1 + i nu) - pi / 2
    let arg_gamma = ln_gamma(Complex64::new(1.0, nu)).im - 0.5 * PI;
    let phase = 0.5 * nu * (mass / (2.0 * alpha)).ln() - arg_gamma;
    Ok(Complex64::from_polar(k.sign * ln_mod.exp(), phase))
}

/// `int K_{i nu}((M/alpha) e^{alpha xi}) sin(omega_1 (xi - xi_-)) dxi`
/// as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledOverlap {
    pub mantissa: f64,
    pub log_scale: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl ScaledOverlap {
    fn value_shifted(&self, shift: f64) -> Result<(f64, f64), Error> {
        let e = self.log_scale + shift;
        if e > f64::MAX.ln() {
            return Err(Error::SpecialFn(crate::specialfn::SpecialFnError::Range {
                function: "spatial_overlap",
                detail: format!("overlap ~ exp({e:.1}) overflows"),
            }));
        }
        let f = e.exp();
        Ok((self.mantissa * f, self.abs_error * f))
    }
}

// The integrand is of order one in units of the reference scale, and each
// Bessel value carries ~1e-14 relative noise; an absolute target below that
// floor can never be met once the overlap cancels at large Omega.
fn overlap_config() -> QuadratureConfig {
    QuadratureConfig::with_tolerances(1e-11, 1e-13)
}

/// Overlap between explicit Rindler walls.
pub fn spatial_overlap_between(
    omega: f64,
    alpha: f64,
    mass: f64,
    xi_minus: f64,
    xi_plus: f64,
    omega1: f64,
) -> Result<ScaledOverlap, Error> {
    check_mode_args(omega, mass, alpha)?;
    if !(xi_plus > xi_minus) {
        return Err(Error::Domain(format!("need xi_+ > xi_-, got [{xi_minus}, {xi_plus}]")));
    }
    let nu = omega / alpha;
    let x0 = mass / alpha;
    let reference = bessel_k_imag_scaled(nu, x0 * (alpha * xi_minus).exp())?.log_scale;
    let failure = std::cell::Cell::new(None);
    let f = |xi: f64| match bessel_k_imag_scaled(nu, x0 * (alpha * xi).exp()) {
        Ok(s) => s.mantissa * (s.log_scale - reference).exp() * (omega1 * (xi - xi_minus)).sin(),
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let r = integrate(f, xi_minus, xi_plus, &overlap_config());
    if let Some(e) = failure.take() {
        return Err(e.into());
    }
    let r = r?;
    Ok(ScaledOverlap {
        mantissa: r.value,
        log_scale: reference,
        abs_error: r.error_estimate,
        evaluations: r.evaluations,
    })
}

fn require_accelerated(geometry: &CavityGeometry) -> Result<(), Error> {
    if !geometry.is_accelerated() {
        return Err(Error::Domain("the accelerated clock needs alpha > 0".into()));
    }
    Ok(())
}

fn overlap_raw(omega: f64, geometry: &CavityGeometry, mass: f64) -> Result<ScaledOverlap, Error> {
    require_accelerated(geometry)?;
    spatial_overlap_between(
        omega,
        geometry.alpha,
        mass,
        geometry.xi_minus,
        geometry.xi_plus,
        geometry.mode_frequency(1),
    )
}

/// The wall overlap `S(Omega)`; may underflow to zero for small `alpha`.
pub fn spatial_overlap(omega: f64, geometry: &CavityGeometry, mass: f64) -> Result<f64, Error> {
    Ok(overlap_raw(omega, geometry, mass)?.value_shifted(0.0)?.0)
}

/// `exp(pi Omega / (2 alpha)) S(Omega)` and its error estimate.
pub fn spatial_overlap_scaled(omega: f64, geometry: &CavityGeometry, mass: f64) -> Result<(f64, f64), Error> {
    let s = overlap_raw(omega, geometry, mass)?;
    s.value_shifted(0.5 * PI * omega / geometry.alpha)
}

/// `(4 / pi^2) |Gamma(i nu)|^-2 / Omega` times the bracket, written out
/// as printed; used to cross-check the reduced integrand.
#[doc(hidden)]
pub fn literal_integrand(omega: f64, overlap: f64, omega1: f64, alpha: f64, tau: f64) -> Result<f64, Error> {
    let nu = omega / alpha;
    let inv_gamma_sq = (-ln_gamma_abs_sq_imag(nu)?).exp();
    let n = SqueezingFactor::new(omega, alpha)?.thermal_weight;
    let bracket = resonance_kernel(omega - omega1, tau)
        + n * (resonance_kernel(omega - omega1, tau) + resonance_kernel(omega + omega1, tau));
    Ok(4.0 / (PI * PI) / omega * inv_gamma_sq * overlap * overlap * bracket)
}

/// Reduced integrand in terms of the scaled overlap, without `lambda^2`.
fn reduced_integrand(omega: f64, scaled_overlap: f64, omega1: f64, alpha: f64, tau: f64) -> f64 {
    let nu = omega / alpha;
    let bracket =
        resonance_kernel(omega - omega1, tau) + (-2.0 * PI * nu).exp() * resonance_kernel(omega + omega1, tau);
    2.0 / (PI.powi(3) * alpha) * scaled_overlap * scaled_overlap * bracket
}

#[doc(hidden)]
pub fn reduced_integrand_at(omega: f64, geometry: &CavityGeometry, mass: f64, tau: f64) -> Result<f64, Error> {
    let (s, _) = spatial_overlap_scaled(omega, geometry, mass)?;
    Ok(reduced_integrand(omega, s, geometry.mode_frequency(1), geometry.alpha, tau))
}

/// Relative lower endpoint of the frequency integral.
pub const OMEGA_MIN_FRACTION: f64 = 1e-8;

/// Finite-proper-time decay probability of the accelerated clock.
pub fn decay_probability_accelerated(
    geometry: &CavityGeometry,
    fields: &FieldParams,
    tau: f64,
    cfg: &QuadratureConfig,
) -> Result<DecayResult, Error> {
    require_accelerated(geometry)?;
    fields.validate()?;
    cfg.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("interaction time must be non-negative, got {tau}")));
    }
    let omega1 = geometry.mode_frequency(1);
    let regime = Regime::classify(tau, omega1 - fields.mass);
    if tau == 0.0 {
        return Ok(DecayResult {
            value: 0.0,
            error_estimate: 0.0,
            kind: ValueKind::Probability,
            regime,
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        });
    }

    let alpha = geometry.alpha;
    let mass = fields.mass;
    let failure = std::cell::Cell::new(None);
    let integrand = |omega: f64| match spatial_overlap_scaled(omega, geometry, mass) {
        Ok((s, _)) => reduced_integrand(omega, s, omega1, alpha, tau),
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let checked = |r: Result<_, _>| -> Result<crate::quadrature::IntegralResult, Error> {
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(r?)
    };

    let omega_min = OMEGA_MIN_FRACTION * omega1;
    let width = 2.0 * PI / tau;
    let mut upper = 4.0 * omega1 + 32.0 * width;
    let head = checked(integrate_resonant(
        integrand,
        omega_min,
        upper,
        Resonance { center: omega1, width },
        cfg,
    ))?;
    let mut value = head.value;
    let mut error = head.error_estimate;
    let mut evaluations = head.evaluations;
    let mut converged = head.converged;

    // The integrand is bounded near Omega = 0; the omitted sliver is at
    // most omega_min times its value there.
    error += omega_min * integrand(omega_min).abs();
    if let Some(e) = failure.take() {
        return Err(e);
    }

    // Extend the domain until a sampled envelope bounds the remaining tail.
    const MAX_DOUBLINGS: usize = 12;
    const ENVELOPE_SAMPLES: usize = 16;
    let mut tail = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        let next = 2.0 * upper;
        let mut envelope = 0.0f64;
        for j in 0..ENVELOPE_SAMPLES {
            let omega = upper + (next - upper) * (j as f64 + 0.5) / ENVELOPE_SAMPLES as f64;
            let s = spatial_overlap_scaled(omega, geometry, mass)?.0;
            // kern(x) <= 1 / x^2
            envelope = envelope.max(2.0 / (PI.powi(3) * alpha) * s * s * 2.0 / (omega - omega1).powi(2));
        }
        evaluations += ENVELOPE_SAMPLES;
        // Integrand falls at least as 1 / Omega^2 beyond here.
        tail = envelope * upper;
        if tail <= 0.1 * cfg.target(value) {
            break;
        }
        let piece = checked(integrate(integrand, upper, next, cfg))?;
        value += piece.value;
        error += piece.error_estimate;
        evaluations += piece.evaluations;
        converged &= piece.converged;
        upper = next;
    }
    if tail > 0.1 * cfg.target(value) {
        converged = false;
    }
    error += tail;

    let lambda2 = fields.lambda * fields.lambda;
    Ok(DecayResult {
        value: lambda2 * value,
        error_estimate: lambda2 * error,
        kind: ValueKind::Probability,
        regime,
        diagnostics: Diagnostics {
            evaluations,
            converged,
            cutoff: Some(upper),
            ..Default::default()
        },
    })
}

/// Long-time rate `lambda^2 S~(omega_1)^2 / (pi^2 alpha)`.
pub fn decay_rate_accelerated_longtime(geometry: &CavityGeometry, fields: &FieldParams) -> Result<DecayResult, Error> {
    require_accelerated(geometry)?;
    fields.validate()?;
    let omega1 = geometry.mode_frequency(1);
    let s = overlap_raw(omega1, geometry, fields.mass)?;
    // ln of exp(pi nu) S^2, formed before exponentiating
    let ln_scale = 2.0 * s.log_scale + PI * omega1 / geometry.alpha;
    let pref = fields.lambda * fields.lambda / (PI * PI * geometry.alpha);
    if ln_scale > f64::MAX.ln() {
        return Err(Error::SpecialFn(crate::specialfn::SpecialFnError::Range {
            function: "decay_rate_accelerated_longtime",
            detail: format!("rate ~ exp({ln_scale:.1}) overflows"),
        }));
    }
    let scale = ln_scale.exp();
    let value = pref * s.mantissa * s.mantissa * scale;
    let error = pref * scale * (2.0 * s.mantissa.abs() * s.abs_error + s.abs_error * s.abs_error)
        + 8.0 * f64::EPSILON * value;
    Ok(DecayResult {
        value,
        error_estimate: error,
        kind: ValueKind::Rate,
        regime: Regime::LongTime,
        diagnostics: Diagnostics {
            evaluations: s.evaluations,
            converged: true,
            ..Default::default()
        },
    })
}

/// Long-time rate averaged uniformly over an acceleration window.
pub fn averaged_decay_rate(geometry: &CavityGeometry, fields: &FieldParams, window: &AveragingWindow) -> Result<DecayResult, Error> {
    window.validate()?;
    fields.validate()?;
    let l = geometry.l;
    let alphas = window.alphas();
    if let Some(&worst) = alphas.last() {
        if worst * l >= 2.0 {
            return Err(Error::HorizonCrossing { l, alpha: worst });
        }
    }
    let points: Vec<Result<DecayResult, Error>> = alphas
        .par_iter()
        .map(|&a| decay_rate_accelerated_longtime(&cavity_geometry(l, a)?, fields))
        .collect();
    let mut sum = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in points {
        let p = p?;
        sum += p.value;
        error += p.error_estimate;
        evaluations += p.diagnostics.evaluations;
        lo = lo.min(p.value);
        hi = hi.max(p.value);
    }
    let n = alphas.len() as f64;
    Ok(DecayResult {
        value: sum / n,
        error_estimate: error / n,
        kind: ValueKind::Rate,
        regime: Regime::LongTime,
        diagnostics: Diagnostics {
            evaluations,
            converged: true,
            samples: Some(alphas.len()),
            window_min: Some(lo),
            window_max: Some(hi),
            ..Default::default()
        },
    })
}

/// `averaged rate / stationary rate - 1` for a cavity of the same length.
pub fn ideal_clock_deviation(geometry: &CavityGeometry, fields: &FieldParams, window: &AveragingWindow) -> Result<DecayResult, Error> {
    let stationary = stationary_reference(geometry, fields)?;
    deviation_from(averaged_decay_rate(geometry, fields, window)?, stationary)
}

/// Same as [`ideal_clock_deviation`] with the unaveraged long-time rate.
pub fn pointwise_clock_deviation(geometry: &CavityGeometry, fields: &FieldParams) -> Result<DecayResult, Error> {
    let stationary = stationary_reference(geometry, fields)?;
    deviation_from(decay_rate_accelerated_longtime(geometry, fields)?, stationary)
}

fn stationary_reference(geometry: &CavityGeometry, fields: &FieldParams) -> Result<DecayResult, Error> {
    let stationary = decay_rate_stationary_longtime(&cavity_geometry(geometry.l, 0.0)?, fields)?;
    if stationary.value == 0.0 {
        return Err(Error::UndefinedRatio(format!(
            "the stationary rate vanishes (M = {} >= pi/l = {})",
            fields.mass,
            PI / geometry.l
        )));
    }
    Ok(stationary)
}

fn deviation_from(accelerated: DecayResult, stationary: DecayResult) -> Result<DecayResult, Error> {
    let ratio = accelerated.value / stationary.value;
    Ok(DecayResult {
        value: ratio - 1.0,
        error_estimate: accelerated.error_estimate / stationary.value
            + ratio.abs() * stationary.error_estimate / stationary.value,
        kind: ValueKind::Deviation,
        regime: Regime::LongTime,
        diagnostics: accelerated.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{bessel_k_imag_trapezoid, trapezoid};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fields() -> FieldParams {
        FieldParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn thermal_identity() {
        for omega in [0.01, 0.3, 1.0, 3.0, 20.0] {
            for alpha in [0.05, 0.5, 1.0, 1.9] {
                let s = SqueezingFactor::new(omega, alpha).unwrap();
                assert_relative_eq!(s.r.sinh().powi(2), s.thermal_weight, max_relative = 1e-12);
            }
        }
        let tiny = SqueezingFactor::new(1.0, 1e-3).unwrap();
        assert_eq!(tiny.thermal_weight, 0.0);
        assert!(SqueezingFactor::new(0.0, 1.0).is_err());
    }

    #[test]
    fn window_validation_and_points() {
        let w = AveragingWindow::new(0.5);
        assert!(w.validate().is_ok());
        let a = w.alphas();
        assert_eq!(a.len(), 64);
        assert_relative_eq!(a[0], 0.475, max_relative = 1e-15);
        assert_relative_eq!(a[63], 0.525, max_relative = 1e-15);
        for bad in [
            AveragingWindow { relative_halfwidth: 0.0, ..w },
            AveragingWindow { relative_halfwidth: 1.0, ..w },
            AveragingWindow { samples: 7, ..w },
            AveragingWindow { center_alpha: 0.0, ..w },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn mode_modulus_matches_gamma_identity() {
        let (omega, alpha, mass) = (1.3, 0.7, 0.9);
        let nu = omega / alpha;
        for xi in [-0.5, 0.0, 0.4] {
            let f = rindler_mode_spatial(omega, xi, mass, alpha).unwrap();
            let x = mass / alpha * (alpha * xi).exp();
            let k = bessel_k_imag_trapezoid(nu, x);
            let expect = nu * (PI * nu).sinh() / (PI * PI * omega) * k * k;
            assert_relative_eq!(f.norm_sqr(), expect, max_relative = 1e-11);
        }
        assert!(rindler_mode_spatial(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn mode_decays_far_from_horizon() {
        let near = rindler_mode_spatial(1.0, 0.0, 1.0, 0.5).unwrap().norm();
        let far = rindler_mode_spatial(1.0, 8.0, 1.0, 0.5).unwrap().norm();
        assert!(far < 1e-20 * near);
        let very_far = rindler_mode_spatial(1.0, 20.0, 1.0, 0.5).unwrap().norm();
        assert_eq!(very_far, 0.0);
    }

    #[test]
    fn ode_residual() {
        let (omega, alpha, mass, h) = (1.0, 0.5, 1.0, 1e-3);
        for j in 0..=20 {
            let xi = -1.0 + 0.1 * j as f64;
            let f = |x: f64| rindler_mode_spatial(omega, x, mass, alpha).unwrap();
            let (m, c, p) = (f(xi - h), f(xi), f(xi + h));
            let second = (p - 2.0 * c + m) / (h * h);
            let kinetic = omega * omega * c;
            let potential = (mass * (alpha * xi).exp()).powi(2) * c;
            let scale = second.norm().max(kinetic.norm()).max(potential.norm());
            assert!((second + kinetic - potential).norm() / scale < 1e-4, "xi = {xi}");
        }
    }

    #[test]
    fn overlap_matches_trapezoid_oracle() {
        let g = cavity_geometry(1.0, 0.5).unwrap();
        let w1 = g.mode_frequency(1);
        let ours = spatial_overlap(w1, &g, 1.0).unwrap();
        let nu = w1 / g.alpha;
        let oracle = trapezoid(
            |xi| {
                bessel_k_imag_trapezoid(nu, 2.0 * (0.5 * xi).exp()) * (w1 * (xi - g.xi_minus)).sin()
            },
            g.xi_minus,
            g.xi_plus,
            100_000,
        );
        assert!((ours - oracle).abs() < 1e-6 * oracle.abs().max(1e-300), "{ours} vs {oracle}");
    }

    #[test]
    fn overlap_translation() {
        // M -> M e^{alpha c} is the same as moving the walls by c
        let (alpha, mass, omega, w1, c) = (0.4, 1.2, 2.0, 3.0, 0.3);
        let a = spatial_overlap_between(omega, alpha, mass * (alpha * c).exp(), -0.5, 0.5, w1).unwrap();
        let b = spatial_overlap_between(omega, alpha, mass, -0.5 + c, 0.5 + c, w1).unwrap();
        let va = a.mantissa * a.log_scale.exp();
        let vb = b.mantissa * b.log_scale.exp();
        assert_relative_eq!(va, vb, max_relative = 1e-9);
    }

    #[test]
    fn reduced_integrand_matches_printed_form() {
        let g = cavity_geometry(1.0, 0.5).unwrap();
        let w1 = g.mode_frequency(1);
        for omega in [0.2, 1.5, w1, 4.0, 9.0] {
            let s = spatial_overlap(omega, &g, 1.0).unwrap();
            let literal = literal_integrand(omega, s, w1, g.alpha, 25.0).unwrap();
            let reduced = reduced_integrand_at(omega, &g, 1.0, 25.0).unwrap();
            assert_relative_eq!(literal, reduced, max_relative = 1e-9);
        }
    }

    #[test]
    fn longtime_prefactor_matches_resonant_limit() {
        // Only kern(Omega - w1) concentrates at resonance, with weight 1 + sinh^2 r:
        // 2 (1 + sinh^2 r) (Omega/alpha) sinh(pi Omega/alpha) / pi = exp(pi Omega/alpha) Omega / (pi alpha)
        for (omega, alpha) in [(3.0, 0.5), (1.0, 1.5), (2.5, 0.1), (0.2, 1.0)] {
            let s = SqueezingFactor::new(omega, alpha).unwrap();
            let nu = omega / alpha;
            let lhs = 2.0 * (1.0 + s.thermal_weight) * nu * (PI * nu).sinh() / PI;
            let rhs = (PI * nu).exp() * omega / (PI * alpha);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn probability_basics() {
        let g = cavity_geometry(1.0, 0.5).unwrap();
        let cfg = QuadratureConfig::with_tolerances(1e-6, 1e-15);
        assert_eq!(decay_probability_accelerated(&g, &fields(), 0.0, &cfg).unwrap().value, 0.0);
        let p1 = decay_probability_accelerated(&g, &fields(), 5.0, &cfg).unwrap();
        let f2 = FieldParams::new(1.0, 3.0).unwrap();
        let p2 = decay_probability_accelerated(&g, &f2, 5.0, &cfg).unwrap();
        assert_relative_eq!(p2.value / p1.value, 9.0, max_relative = 1e-14);
        let p3 = decay_probability_accelerated(&g, &fields(), 10.0, &cfg).unwrap();
        assert!(p3.value >= p1.value && p1.value > 0.0);
        assert!(decay_probability_accelerated(&g, &fields(), -1.0, &cfg).is_err());
    }

    #[test]
    fn longtime_lambda_scaling_and_horizon() {
        let g = cavity_geometry(1.0, 0.5).unwrap();
        let r1 = decay_rate_accelerated_longtime(&g, &fields()).unwrap().value;
        let r2 = decay_rate_accelerated_longtime(&g, &FieldParams::new(1.0, 2.0).unwrap()).unwrap().value;
        assert_relative_eq!(r2 / r1, 4.0, max_relative = 1e-14);
        let rest = cavity_geometry(1.0, 0.0).unwrap();
        assert!(decay_rate_accelerated_longtime(&rest, &fields()).is_err());
        let w = AveragingWindow::new(1.95);
        let g = cavity_geometry(1.0, 1.95).unwrap();
        assert!(matches!(
            averaged_decay_rate(&g, &fields(), &w),
            Err(Error::HorizonCrossing { .. })
        ));
    }

    #[test]
    fn deviation_independent_of_lambda() {
        let g = cavity_geometry(1.0, 0.3).unwrap();
        let w = AveragingWindow { samples: 8, ..AveragingWindow::new(0.3) };
        let a = ideal_clock_deviation(&g, &fields(), &w).unwrap().value;
        let b = ideal_clock_deviation(&g, &FieldParams::new(1.0, 5.0).unwrap(), &w).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-12);
        let heavy = FieldParams::new(4.0, 1.0).unwrap();
        assert!(matches!(ideal_clock_deviation(&g, &heavy, &w), Err(Error::UndefinedRatio(_))));
    }

    #[test]
    fn narrow_window_approaches_pointwise() {
        let g = cavity_geometry(1.0, 0.5).unwrap();
        let point = decay_rate_accelerated_longtime(&g, &fields()).unwrap().value;
        let w = AveragingWindow { relative_halfwidth: 1e-6, samples: 8, center_alpha: 0.5 };
        let avg = averaged_decay_rate(&g, &fields(), &w).unwrap().value;
        assert_relative_eq!(avg, point, max_relative = 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn thermal_weight_vanishes_as_alpha_shrinks(omega in 1.0f64..10.0) {
            let w = SqueezingFactor::new(omega, 0.01).unwrap().thermal_weight;
            prop_assert!(w < 1e-100);
        }
    }
}
