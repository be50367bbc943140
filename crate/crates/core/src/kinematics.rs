//! Classical worldline utilities: proper time, the integrated proper
//! acceleration, Rindler coordinates and the accelerated cavity geometry.
//!
//! Natural units (`c = 1`) throughout.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;
use crate::quadrature::{integrate, IntegralResult, QuadratureConfig, QuadratureError};

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A timelike worldline `x(t)` given by its velocity and acceleration histories.
#[derive(Clone)]
pub struct Trajectory {
    velocity: Profile,
    acceleration: Profile,
    label: String,
}

impl fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Trajectory").field("label", &self.label).finish()
    }
}

impl Trajectory {
    /// Custom worldline; `acceleration` must be the derivative of `velocity`.
    pub fn new<V, A>(velocity: V, acceleration: A) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        A: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            velocity: Arc::new(velocity),
            acceleration: Arc::new(acceleration),
            label: "custom".into(),
        }
    }

    pub fn rest() -> Self {
        Self {
            label: "rest".into(),
            ..Self::new(|_| 0.0, |_| 0.0)
        }
    }

    pub fn constant_velocity(v: f64) -> Self {
        Self {
            label: format!("constant velocity {v}"),
            ..Self::new(move |_| v, |_| 0.0)
        }
    }

    /// Hyperbolic motion from rest at `t = 0` with proper acceleration `alpha`.
    pub fn uniform_acceleration(alpha: f64) -> Self {
        Self {
            label: format!("uniform proper acceleration {alpha}"),
            ..Self::new(
                move |t| alpha * t / (1.0 + (alpha * t).powi(2)).sqrt(),
                move |t| alpha / (1.0 + (alpha * t).powi(2)).powf(1.5),
            )
        }
    }

    /// `x(t) = A sin(omega t)`.
    pub fn sinusoidal(amplitude: f64, omega: f64) -> Self {
        Self {
            label: format!("sinusoidal A={amplitude} omega={omega}"),
            ..Self::new(
                move |t| amplitude * omega * (omega * t).cos(),
                move |t| -amplitude * omega * omega * (omega * t).sin(),
            )
        }
    }

    pub fn velocity(&self, t: f64) -> f64 {
        (self.velocity)(t)
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        (self.acceleration)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Proper acceleration `a / (1 - v^2)^(3/2)` at lab time `t`.
    pub fn proper_acceleration(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        self.acceleration(t) / (1.0 - v * v).powf(1.5)
    }
}

fn path_integral<F>(traj: &Trajectory, t0: f64, t1: f64, cfg: &QuadratureConfig, f: F) -> Result<IntegralResult, Error>
where
    F: Fn(f64, f64) -> f64,
{
    if !(t1 >= t0) {
        return Err(Error::Domain(format!("need t1 >= t0, got [{t0}, {t1}]")));
    }
    for t in [t0, t1] {
        let v = traj.velocity(t);
        if !(v.abs() < 1.0) {
            return Err(Error::Superluminal { t, v });
        }
    }
    let integrand = |t: f64| {
        let v = traj.velocity(t);
        if v.abs() < 1.0 {
            f(v, traj.acceleration(t))
        } else {
            f64::NAN
        }
    };
    integrate(integrand, t0, t1, cfg).map_err(|e| match e {
        QuadratureError::NonFinite { abscissa, .. } => {
            let v = traj.velocity(abscissa);
            if v.abs() >= 1.0 || v.is_nan() {
                Error::Superluminal { t: abscissa, v }
            } else {
                Error::Quadrature(e)
            }
        }
        other => Error::Quadrature(other),
    })
}

fn kinematics_config() -> QuadratureConfig {
    QuadratureConfig::with_tolerances(1e-12, 1e-15)
}

/// Elapsed proper time `int sqrt(1 - v^2) dt` over `[t0, t1]`.
pub fn proper_time(traj: &Trajectory, t0: f64, t1: f64) -> Result<IntegralResult, Error> {
    proper_time_with(traj, t0, t1, &kinematics_config())
}

pub fn proper_time_with(
    traj: &Trajectory,
    t0: f64,
    t1: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult, Error> {
    // 1 - v^2 as (1 - v)(1 + v) keeps precision for small v
    path_integral(traj, t0, t1, cfg, |v, _| ((1.0 - v) * (1.0 + v)).sqrt())
}

/// `int a / (1 - v^2) dt`, the proper acceleration integrated over proper time.
pub fn acceleration_invariant(traj: &Trajectory, t0: f64, t1: f64) -> Result<IntegralResult, Error> {
    acceleration_invariant_with(traj, t0, t1, &kinematics_config())
}

pub fn acceleration_invariant_with(
    traj: &Trajectory,
    t0: f64,
    t1: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult, Error> {
    path_integral(traj, t0, t1, cfg, |v, a| a / ((1.0 - v) * (1.0 + v)))
}

/// Rindler coordinates of the accelerated frame whose reference worldline
/// has proper acceleration `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RindlerPoint {
    pub xi: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkowskiPoint {
    pub x: f64,
    pub t: f64,
}

fn check_alpha(alpha: f64) -> Result<(), Error> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

pub fn rindler_from_minkowski(x: f64, t: f64, alpha: f64) -> Result<RindlerPoint, Error> {
    check_alpha(alpha)?;
    if !(x > t.abs()) {
        return Err(Error::Domain(format!(
            "({x}, {t}) lies outside the right Rindler wedge x > |t|"
        )));
    }
    let interval = ((x - t) * (x + t)).sqrt();
    Ok(RindlerPoint {
        xi: (alpha * interval).ln() / alpha,
        tau: (t / x).atanh() / alpha,
    })
}

pub fn minkowski_from_rindler(xi: f64, tau: f64, alpha: f64) -> Result<MinkowskiPoint, Error> {
    check_alpha(alpha)?;
    let r = (alpha * xi).exp() / alpha;
    let (sh, ch) = ((alpha * tau).sinh(), (alpha * tau).cosh());
    Ok(MinkowskiPoint { x: r * ch, t: r * sh })
}

/// Cavity of proper length `l` whose center moves with proper acceleration
/// `alpha`; `alpha = 0` is the cavity at rest with walls at `-l/2, +l/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub l: f64,
    pub alpha: f64,
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub xi_minus: f64,
    pub xi_plus: f64,
    /// `ln(sigma_+ / sigma_-)`, or `l` at rest.
    log_ratio: f64,
}

impl CavityGeometry {
    pub fn at_rest(l: f64) -> Result<Self, Error> {
        cavity_geometry(l, 0.0)
    }

    pub fn is_accelerated(&self) -> bool {
        self.alpha > 0.0
    }

    /// Mode frequency `omega_n`: `n pi / l` at rest, `alpha n pi / ln(sigma_+/sigma_-)` otherwise.
    pub fn mode_frequency(&self, n: u32) -> f64 {
        let n = f64::from(n);
        if self.is_accelerated() {
            self.alpha * n * std::f64::consts::PI / self.log_ratio
        } else {
            n * std::f64::consts::PI / self.l
        }
    }

    /// Coordinate length between the walls in the cavity's own frame.
    pub fn coordinate_length(&self) -> f64 {
        self.xi_plus - self.xi_minus
    }
}

pub fn cavity_geometry(l: f64, alpha: f64) -> Result<CavityGeometry, Error> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!("cavity length must be positive, got {l}")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(CavityGeometry {
            l,
            alpha,
            sigma_minus: -0.5 * l,
            sigma_plus: 0.5 * l,
            xi_minus: -0.5 * l,
            xi_plus: 0.5 * l,
            log_ratio: l,
        });
    }
    if alpha * l >= 2.0 {
        return Err(Error::HorizonCrossing { l, alpha });
    }
    let half = 0.5 * alpha * l;
    Ok(CavityGeometry {
        l,
        alpha,
        sigma_minus: 1.0 / alpha - 0.5 * l,
        sigma_plus: 1.0 / alpha + 0.5 * l,
        // ln(alpha sigma_-+) = ln(1 -+ alpha l / 2)
        xi_minus: (-half).ln_1p() / alpha,
        xi_plus: half.ln_1p() / alpha,
        log_ratio: 2.0 * half.atanh(),
    })
}
