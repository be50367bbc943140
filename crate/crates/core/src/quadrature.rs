//! Globally adaptive Gauss-Kronrod integration.
//!
//! The integrator bisects the subinterval with the largest error estimate
//! until the summed estimate meets `max(abs_tol, rel_tol * |I|)` or the
//! subdivision budget runs out. Known removable singularities and resonance
//! peaks are turned into initial breakpoints so the 21-point rule never has
//! to discover them on its own. Endpoints are never sampled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand returned {value} at x = {abscissa}")]
    NonFinite { abscissa: f64, value: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
}

/// A narrow peak of the integrand, `center` with characteristic `width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub center: f64,
    pub width: f64,
}

/// Offsets (in widths) at which a resonance is bracketed before refinement.
pub const RESONANCE_SPLITS: [f64; 3] = [1.0, 4.0, 16.0];

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Length of the truncated domain used for `b = +inf`. `None` maps the
    /// half line onto `[0, 1)` instead.
    pub domain_cutoff: Option<f64>,
    /// Removable singularities; they become breakpoints and are never sampled.
    pub singular_points: Vec<f64>,
    pub resonance_points: Vec<Resonance>,
}

impl QuadratureConfig {
    pub const DEFAULT_REL_TOL: f64 = 1e-8;
    pub const DEFAULT_ABS_TOL: f64 = 1e-15;
    pub const DEFAULT_MAX_SUBDIVISIONS: usize = 20_000;

    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(QuadratureError::InvalidConfig(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(QuadratureError::InvalidConfig(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadratureError::InvalidConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if let Some(c) = self.domain_cutoff {
            if !(c > 0.0) || !c.is_finite() {
                return Err(QuadratureError::InvalidConfig(format!(
                    "domain_cutoff must be positive and finite, got {c}"
                )));
            }
        }
        for r in &self.resonance_points {
            if !(r.width > 0.0) {
                return Err(QuadratureError::InvalidConfig(format!(
                    "resonance width must be positive, got {}",
                    r.width
                )));
            }
        }
        Ok(())
    }

    /// Tolerance target for a given integral magnitude.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            abs_tol: Self::DEFAULT_ABS_TOL,
            max_subdivisions: Self::DEFAULT_MAX_SUBDIVISIONS,
            domain_cutoff: None,
            singular_points: Vec::new(),
            resonance_points: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_624_425,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Ties broken on position so the refinement order is fully deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One 21-point Kronrod panel over `[a, b]`, returning `(integral, error)`.
fn kronrod21<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, QuadratureError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite {
                abscissa: x,
                value: y,
            })
        }
    };

    let fc = eval(center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_k - res_g) * half;
    let abs_half = half.abs();
    Ok((
        res_k * half,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    ))
}

const EVALS_PER_PANEL: usize = 21;

fn adaptive<F>(f: &F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0;

    for w in breakpoints.windows(2) {
        let (value, error) = kronrod21(f, w[0], w[1])?;
        evaluations += EVALS_PER_PANEL;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let totals = |heap: &BinaryHeap<Segment>, frozen: &[Segment]| -> (f64, f64) {
        // Summation in position order keeps results independent of heap layout.
        let mut all: Vec<&Segment> = heap.iter().chain(frozen.iter()).collect();
        all.sort_by(|x, y| x.a.total_cmp(&y.a));
        all.iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
    };

    let (mut value, mut error) = totals(&heap, &frozen);
    let mut segments = heap.len();

    while error > cfg.target(value) && segments < cfg.max_subdivisions {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Interval exhausted at machine resolution.
        if !(mid > worst.a && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = kronrod21(f, worst.a, mid)?;
        let (v2, e2) = kronrod21(f, mid, worst.b)?;
        evaluations += 2 * EVALS_PER_PANEL;
        segments += 1;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    let (value, error) = totals(&heap, &frozen);
    Ok(IntegralResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= cfg.target(value),
    })
}

/// Sorted, deduplicated breakpoints strictly inside `(a, b)` plus the ends.
fn breakpoints(a: f64, b: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = interior
        .into_iter()
        .filter(|&p| p.is_finite() && p > a && p < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn resonance_splits(r: &Resonance) -> impl Iterator<Item = f64> + '_ {
    RESONANCE_SPLITS
        .iter()
        .flat_map(move |k| [r.center - k * r.width, r.center + k * r.width])
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !a.is_finite() || b.is_nan() || b < a {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }

    let interior = cfg
        .singular_points
        .iter()
        .copied()
        .chain(cfg.resonance_points.iter().flat_map(resonance_splits));

    if b.is_finite() {
        let pts = breakpoints(a, b, interior);
        return adaptive(&f, &pts, cfg);
    }

    match cfg.domain_cutoff {
        Some(cutoff) => {
            let end = a + cutoff;
            let pts = breakpoints(a, end, interior);
            adaptive(&f, &pts, cfg)
        }
        None => {
            // x = a + u / (1 - u), u in [0, 1)
            let to_unit = |x: f64| {
                let d = x - a;
                d / (1.0 + d)
            };
            let pts = breakpoints(0.0, 1.0, interior.map(to_unit));
            let mapped = |u: f64| {
                let one_minus = 1.0 - u;
                let x = a + u / one_minus;
                f(x) / (one_minus * one_minus)
            };
            adaptive(&mapped, &pts, cfg).map_err(|e| match e {
                QuadratureError::NonFinite { abscissa, value } => QuadratureError::NonFinite {
                    abscissa: a + abscissa / (1.0 - abscissa),
                    value,
                },
                other => other,
            })
        }
    }
}

/// Integrate with the domain pre-split around a known resonance peak.
pub fn integrate_resonant<F>(
    f: F,
    a: f64,
    b: f64,
    resonance: Resonance,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(resonance.width > 0.0) {
        return Err(QuadratureError::InvalidConfig(format!(
            "resonance width must be positive, got {}",
            resonance.width
        )));
    }
    let mut cfg = cfg.clone();
    cfg.resonance_points.push(resonance);
    integrate(f, a, b, &cfg)
}
