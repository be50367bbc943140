//! Decay of the cavity clock at rest.
//!
//! Internally every length is measured in units of the cavity length `l`:
//! `k = K l`, `m = M l`, `T = t / l`, `w = sqrt(k^2 + m^2)`. Then
//!
//! ```text
//! P(t) = 4 lambda^2 l^4 * 2 int_0^inf [cos(k/2) / (k^2 - pi^2)]^2 kern(w - pi, T) / w dk
//! ```
//!
//! with `kern(x, T) = sin^2(x T / 2) / x^2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Error;
use crate::kinematics::CavityGeometry;
use crate::quadrature::{integrate, integrate_resonant, QuadratureConfig, Resonance};
use crate::specialfn::resonance_kernel;

/// Parameters of the external massive field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub mass: f64,
    pub lambda: f64,
}

impl FieldParams {
    pub fn new(mass: f64, lambda: f64) -> Result<Self, Error> {
        let p = Self { mass, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::Domain(format!(
                "field mass must be positive (the massless case is infrared divergent), got {}",
                self.mass
            )));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Domain(format!(
                "coupling lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Probability,
    Rate,
    Deviation,
}

impl ValueKind {
    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Probability => "probability",
            ValueKind::Rate => "rate",
            ValueKind::Deviation => "deviation",
        }
    }
}

/// Heuristic classification of the interaction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    ShortTime,
    Generic,
    LongTime,
}

impl Regime {
    pub const SHORT_TIME_BELOW: f64 = 0.1;
    pub const LONG_TIME_ABOVE: f64 = 100.0;

    /// Classifies by `t * |detuning|`.
    pub fn classify(t: f64, detuning: f64) -> Self {
        let x = t * detuning.abs();
        if x < Self::SHORT_TIME_BELOW {
            Regime::ShortTime
        } else if x > Self::LONG_TIME_ABOVE {
            Regime::LongTime
        } else {
            Regime::Generic
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::ShortTime => "short-time",
            Regime::Generic => "generic",
            Regime::LongTime => "long-time",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub evaluations: usize,
    pub converged: bool,
    /// Upper end of the truncated integration domain, in the caller's units.
    pub cutoff: Option<f64>,
    pub samples: Option<usize>,
    /// Smallest and largest pointwise rate seen in an averaging window.
    pub window_min: Option<f64>,
    pub window_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayResult {
    pub value: f64,
    pub error_estimate: f64,
    pub kind: ValueKind,
    pub regime: Regime,
    pub diagnostics: Diagnostics,
}

/// Resting cavity mode `u_n(x, t)`; zero outside the walls.
pub fn cavity_mode(n: u32, x: f64, t: f64, geometry: &CavityGeometry) -> Result<Complex64, Error> {
    if n == 0 {
        return Err(Error::Domain("mode number must be at least 1".into()));
    }
    if x < geometry.sigma_minus || x > geometry.sigma_plus {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let omega = f64::from(n) * PI / geometry.l;
    let amplitude = (omega * (x - geometry.sigma_minus)).sin() / (PI * f64::from(n)).sqrt();
    Ok(Complex64::from_polar(1.0, -omega * t) * amplitude)
}

/// Plane wave `U_K(x, t) = exp(i K x - i Omega_K t) / sqrt(4 pi Omega_K)`.
pub fn plane_wave_mode(k: f64, x: f64, t: f64, mass: f64) -> Result<Complex64, Error> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    let omega = k.hypot(mass);
    Ok(Complex64::from_polar(1.0, k * x - omega * t) / (4.0 * PI * omega).sqrt())
}

/// `cos(k/2) / (k^2 - pi^2)`, finite at `k = pi`.
fn mode_profile(k: f64) -> f64 {
    let d = k - PI;
    if d.abs() < 0.5 {
        // cos(k/2) = -sin(d/2), k^2 - pi^2 = d (2 pi + d)
        let h = 0.5 * d;
        let sinc = if h == 0.0 { 1.0 } else { h.sin() / h };
        -0.5 * sinc / (2.0 * PI + d)
    } else {
        (0.5 * k).cos() / ((k - PI) * (k + PI))
    }
}

fn stationary_integrand(k: f64, m: f64, big_t: f64) -> f64 {
    let w = k.hypot(m);
    let p = mode_profile(k);
    p * p * resonance_kernel(w - PI, big_t) / w
}

/// Half-line tail bound of the reduced integrand beyond `cutoff >= 2 pi`.
fn tail_bound(cutoff: f64, big_t: f64) -> f64 {
    (big_t * big_t / (9.0 * cutoff.powi(4))).min(32.0 / (27.0 * cutoff.powi(6)))
}

fn require_rest(geometry: &CavityGeometry) -> Result<(), Error> {
    if geometry.is_accelerated() {
        return Err(Error::Domain(format!(
            "the stationary clock needs a cavity at rest, got alpha = {}",
            geometry.alpha
        )));
    }
    Ok(())
}

/// Finite-time decay probability of the resting cavity clock.
pub fn decay_probability_stationary(
    geometry: &CavityGeometry,
    fields: &FieldParams,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<DecayResult, Error> {
    require_rest(geometry)?;
    fields.validate()?;
    cfg.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("interaction time must be non-negative, got {t}")));
    }
    let l = geometry.l;
    let regime = Regime::classify(t, PI / l - fields.mass);
    if t == 0.0 {
        return Ok(DecayResult {
            value: 0.0,
            error_estimate: 0.0,
            kind: ValueKind::Probability,
            regime,
            diagnostics: Diagnostics { converged: true, ..Default::default() },
        });
    }

    let m = fields.mass * l;
    let big_t = t / l;
    let half = reduced_half_integral(m, big_t, cfg)?;
    let scale = 8.0 * fields.lambda * fields.lambda * l.powi(4);
    Ok(DecayResult {
        value: scale * half.value,
        error_estimate: scale * half.error_estimate,
        kind: ValueKind::Probability,
        regime,
        diagnostics: Diagnostics {
            evaluations: half.evaluations,
            converged: half.converged,
            cutoff: half.cutoff.map(|c| c / l),
            ..Default::default()
        },
    })
}

struct HalfIntegral {
    value: f64,
    error_estimate: f64,
    evaluations: usize,
    converged: bool,
    cutoff: Option<f64>,
}

/// `int_0^inf` of the reduced integrand, tolerances applied to this integral.
fn reduced_half_integral(m: f64, big_t: f64, cfg: &QuadratureConfig) -> Result<HalfIntegral, Error> {
    let mut cutoff = 4.0 * PI;
    while 2.0 * tail_bound(cutoff, big_t) > 0.1 * cfg.abs_tol {
        cutoff *= 2.0;
    }
    let tail = tail_bound(cutoff, big_t);
    let f = |k: f64| stationary_integrand(k, m, big_t);
    let result = if m < PI {
        let k0 = ((PI - m) * (PI + m)).sqrt();
        let width = (2.0 * PI / big_t) * (PI / k0.max(1e-300));
        integrate_resonant(f, 0.0, cutoff, Resonance { center: k0, width }, cfg)?
    } else {
        integrate(f, 0.0, cutoff, cfg)?
    };
    Ok(HalfIntegral {
        value: result.value,
        error_estimate: result.error_estimate + tail,
        evaluations: result.evaluations,
        converged: result.converged,
        cutoff: Some(cutoff),
    })
}

/// Full-line version of the reduced integral, for symmetry checks.
#[doc(hidden)]
pub fn reduced_full_integral(m: f64, big_t: f64, cfg: &QuadratureConfig) -> Result<f64, Error> {
    let mut cutoff = 4.0 * PI;
    while 2.0 * tail_bound(cutoff, big_t) > 0.1 * cfg.abs_tol {
        cutoff *= 2.0;
    }
    let mut cfg = cfg.clone();
    cfg.singular_points.extend([-PI, PI]);
    if m < PI {
        let k0 = ((PI - m) * (PI + m)).sqrt();
        let width = (2.0 * PI / big_t) * (PI / k0);
        cfg.resonance_points.push(Resonance { center: k0, width });
        cfg.resonance_points.push(Resonance { center: -k0, width });
    }
    Ok(integrate(|k| stationary_integrand(k, m, big_t), -cutoff, cutoff, &cfg)?.value)
}

#[doc(hidden)]
pub fn reduced_half(m: f64, big_t: f64, cfg: &QuadratureConfig) -> Result<f64, Error> {
    Ok(reduced_half_integral(m, big_t, cfg)?.value)
}

/// Default relative guard on `|pi/l - M|` for the long-time rate.
pub const THRESHOLD_GUARD: f64 = 1e-6;

/// Long-time decay rate of the resting clock, zero above threshold.
pub fn decay_rate_stationary_longtime(geometry: &CavityGeometry, fields: &FieldParams) -> Result<DecayResult, Error> {
    decay_rate_stationary_longtime_with_guard(geometry, fields, THRESHOLD_GUARD)
}

pub fn decay_rate_stationary_longtime_with_guard(
    geometry: &CavityGeometry,
    fields: &FieldParams,
    guard: f64,
) -> Result<DecayResult, Error> {
    require_rest(geometry)?;
    fields.validate()?;
    if !(guard >= 0.0) {
        return Err(Error::Domain(format!("threshold guard must be non-negative, got {guard}")));
    }
    let l = geometry.l;
    let m = fields.mass * l;
    let gap = (PI - m) / PI;
    if gap.abs() < guard {
        return Err(Error::NearThreshold { gap: gap.abs(), guard });
    }
    let diagnostics = Diagnostics { converged: true, ..Default::default() };
    if m >= PI {
        return Ok(DecayResult {
            value: 0.0,
            error_estimate: 0.0,
            kind: ValueKind::Rate,
            regime: Regime::LongTime,
            diagnostics,
        });
    }
    let k0 = ((PI - m) * (PI + m)).sqrt();
    // cos(k0/2) = sin((pi - k0)/2), with pi - k0 = m^2 / (pi + k0)
    let c = (0.5 * m * m / (PI + k0)).sin();
    let lambda2 = fields.lambda * fields.lambda;
    let value = 4.0 * lambda2 * PI * l.powi(3) * c * c / (k0 * m.powi(4));
    Ok(DecayResult {
        value,
        error_estimate: 16.0 * f64::EPSILON * value,
        kind: ValueKind::Rate,
        regime: Regime::LongTime,
        diagnostics,
    })
}
