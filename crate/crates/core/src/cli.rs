//! Command-line front end.
//!
//! Natural units (`c = hbar = 1`); lengths are the base unit, so `--mass`,
//! `--alpha` are inverse lengths and `--time` is a length.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::accelerated::{
    averaged_decay_rate, decay_probability_accelerated, decay_rate_accelerated_longtime, ideal_clock_deviation,
    pointwise_clock_deviation, AveragingWindow,
};
use crate::error::Error;
use crate::kinematics::cavity_geometry;
use crate::quadrature::QuadratureConfig;
use crate::stationary::{
    decay_probability_stationary, decay_rate_stationary_longtime, DecayResult, Diagnostics, FieldParams,
    ValueKind,
};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

pub const CSV_HEADER: [&str; 12] = [
    "mode",
    "l",
    "M",
    "alpha",
    "lambda",
    "t_or_tau",
    "value",
    "value_kind",
    "error_estimate",
    "regime",
    "status",
    "message",
];

/// Defaults for flags that have one; each mirrors its library counterpart.
pub mod defaults {
    use crate::accelerated::AveragingWindow;
    use crate::quadrature::QuadratureConfig;

    pub const L: f64 = 1.0;
    pub const MASS: f64 = 1.0;
    pub const LAMBDA: f64 = 1.0;
    pub const AVG_WIDTH: f64 = AveragingWindow::DEFAULT_RELATIVE_HALFWIDTH;
    pub const AVG_SAMPLES: usize = AveragingWindow::DEFAULT_SAMPLES;
    pub const REL_TOL: f64 = QuadratureConfig::DEFAULT_REL_TOL;
    pub const ABS_TOL: f64 = QuadratureConfig::DEFAULT_ABS_TOL;
}

#[derive(Debug, Parser)]
#[command(
    name = "qclock",
    version,
    about = "Decay probability and rate of a cavity particle clock at rest and under uniform acceleration",
    after_help = "Units: natural units (c = hbar = 1) with length as the base unit."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cavity at rest: finite-time probability, or the long-time rate with --rate.
    Stationary(PointArgs),
    /// Uniformly accelerated cavity: finite-proper-time probability, or the
    /// acceleration-averaged long-time rate with --rate (--avg-width 0 for the pointwise rate).
    Accelerated(PointArgs),
    /// Relative deviation of the accelerated rate from the resting rate.
    Deviation(PointArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Proper cavity length [default: 1]
    #[arg(long)]
    pub l: Option<f64>,
    /// Mass of the external field [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Proper acceleration of the cavity center
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Coupling strength [default: 1]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Interaction time t (at rest) or proper time tau (accelerated)
    #[arg(long)]
    pub time: Option<f64>,
    /// Long-time rate instead of the finite-time probability
    #[arg(long)]
    pub rate: bool,
    /// Relative halfwidth of the acceleration average; 0 disables averaging [default: 0.05]
    #[arg(long = "avg-width")]
    pub avg_width: Option<f64>,
    /// Sample count of the acceleration average [default: 64]
    #[arg(long = "avg-samples")]
    pub avg_samples: Option<usize>,
    /// Relative quadrature tolerance [default: 1e-8]
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance [default: 1e-15]
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    /// Sweep one parameter: <alpha|l|M|t_or_tau>:<start>:<stop>:<points>:<lin|log>
    #[arg(long)]
    pub sweep: Option<String>,
    /// key=value file with defaults for any of these flags; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path, or "stdout" [default: stdout]
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Run only these groups (repeatable)
    #[arg(long, value_enum)]
    pub only: Vec<verify::Group>,
    /// Relative error injected into |Gamma(iy)|^2 to exercise the suite
    #[arg(long = "perturb-gamma", hide = true, default_value_t = 0.0)]
    pub perturb_gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Stationary,
    Accelerated,
    Deviation,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Stationary => "stationary",
            Mode::Accelerated => "accelerated",
            Mode::Deviation => "deviation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    L,
    Mass,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn parse(s: &str) -> Result<Self, Error> {
        let bad = |why: &str| Error::Domain(format!("invalid --sweep '{s}': {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(bad("expected <param>:<start>:<stop>:<points>:<lin|log>"));
        }
        let param = match parts[0] {
            "alpha" => SweepParam::Alpha,
            "l" => SweepParam::L,
            "M" | "mass" => SweepParam::Mass,
            "t_or_tau" | "time" => SweepParam::Time,
            _ => return Err(bad("parameter must be one of alpha, l, M, t_or_tau")),
        };
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad(&format!("'{p}' is not a number")));
        let start = num(parts[1])?;
        let stop = num(parts[2])?;
        let points: usize = parts[3].trim().parse().map_err(|_| bad("point count must be an integer"))?;
        let spacing = match parts[4] {
            "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            _ => return Err(bad("spacing must be lin or log")),
        };
        let spec = Self { param, start, stop, points, spacing };
        spec.validate().map_err(|e| bad(&e))?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), String> {
        if !self.start.is_finite() || !self.stop.is_finite() || !(self.start < self.stop) {
            return Err("empty range: need start < stop".into());
        }
        if self.points < 2 {
            return Err("need at least 2 points".into());
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return Err("log spacing needs start > 0".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|j| {
                let f = j as f64 / last;
                if j + 1 == self.points {
                    return self.stop;
                }
                match self.spacing {
                    Spacing::Linear => self.start * (1.0 - f) + self.stop * f,
                    Spacing::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }
}

/// Fully resolved parameters of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub mode: Mode,
    pub l: f64,
    pub mass: f64,
    pub alpha: Option<f64>,
    pub lambda: f64,
    pub time: Option<f64>,
    pub rate: bool,
    pub avg_width: f64,
    pub avg_samples: usize,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub point: Point,
    pub sweep: Option<SweepSpec>,
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Compute(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Compute(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

const CONFIG_KEYS: [&str; 12] = [
    "l",
    "mass",
    "alpha",
    "lambda",
    "time",
    "rate",
    "avg-width",
    "avg-samples",
    "rel-tol",
    "abs-tol",
    "sweep",
    "output",
];

/// Parses a `key = value` file; `#` starts a comment, underscores in keys
/// are accepted for dashes.
pub fn parse_config(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key=value, got '{line}'",
                origin.display(),
                n + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown key '{}'",
                origin.display(),
                n + 1,
                k.trim()
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn config_value<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("config: invalid value '{v}' for {key}"))),
    }
}

/// Merges flags over the optional config file over the defaults.
pub fn resolve(mode: Mode, args: &PointArgs) -> Result<Settings, CliError> {
    let map = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text, path)?
        }
        None => BTreeMap::new(),
    };
    let pick = |flag: Option<f64>, key: &str, default: Option<f64>| -> Result<Option<f64>, CliError> {
        Ok(flag.or(config_value(&map, key)?).or(default))
    };
    let l = pick(args.l, "l", Some(defaults::L))?.unwrap_or(defaults::L);
    let mass = pick(args.mass, "mass", Some(defaults::MASS))?.unwrap_or(defaults::MASS);
    let alpha = pick(args.alpha, "alpha", None)?;
    let lambda = pick(args.lambda, "lambda", Some(defaults::LAMBDA))?.unwrap_or(defaults::LAMBDA);
    let time = pick(args.time, "time", None)?;
    let rate = args.rate || config_value::<bool>(&map, "rate")?.unwrap_or(false);
    let avg_width = pick(args.avg_width, "avg-width", Some(defaults::AVG_WIDTH))?.unwrap_or(defaults::AVG_WIDTH);
    let avg_samples = args
        .avg_samples
        .or(config_value(&map, "avg-samples")?)
        .unwrap_or(defaults::AVG_SAMPLES);
    let rel_tol = pick(args.rel_tol, "rel-tol", Some(defaults::REL_TOL))?.unwrap_or(defaults::REL_TOL);
    let abs_tol = pick(args.abs_tol, "abs-tol", Some(defaults::ABS_TOL))?.unwrap_or(defaults::ABS_TOL);
    let sweep = match args.sweep.clone().or_else(|| map.get("sweep").cloned()) {
        Some(s) => Some(SweepSpec::parse(&s)?),
        None => None,
    };
    let output = args
        .output
        .clone()
        .or_else(|| map.get("output").cloned())
        .filter(|o| o != "stdout" && o != "-")
        .map(PathBuf::from);

    let quadrature = QuadratureConfig::with_tolerances(rel_tol, abs_tol);
    quadrature.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if !(0.0..1.0).contains(&avg_width) {
        return Err(CliError::Usage(format!("--avg-width must lie in [0, 1), got {avg_width}")));
    }
    let point = Point {
        mode,
        l,
        mass,
        alpha,
        lambda,
        time,
        rate,
        avg_width,
        avg_samples,
        quadrature,
    };
    let settings = Settings { point, sweep, output };
    check_required(&settings)?;
    Ok(settings)
}

fn check_required(s: &Settings) -> Result<(), CliError> {
    let p = &s.point;
    let swept = s.sweep.map(|w| w.param);
    let need = |present: bool, param: SweepParam, what: &str| {
        if present || swept == Some(param) {
            Ok(())
        } else {
            Err(CliError::Usage(what.to_string()))
        }
    };
    if p.mode != Mode::Stationary {
        need(p.alpha.is_some(), SweepParam::Alpha, "--alpha is required for this mode")?;
    } else if swept == Some(SweepParam::Alpha) {
        return Err(CliError::Usage("the stationary mode has no alpha to sweep".into()));
    }
    let wants_time = p.mode != Mode::Deviation && !p.rate;
    if wants_time {
        need(p.time.is_some(), SweepParam::Time, "--time is required for a finite-time probability (or pass --rate)")?;
    } else if swept == Some(SweepParam::Time) {
        return Err(CliError::Usage("a t_or_tau sweep needs a finite-time probability".into()));
    }
    Ok(())
}

impl Point {
    fn with(&self, param: SweepParam, v: f64) -> Point {
        let mut p = self.clone();
        match param {
            SweepParam::Alpha => p.alpha = Some(v),
            SweepParam::L => p.l = v,
            SweepParam::Mass => p.mass = v,
            SweepParam::Time => p.time = Some(v),
        }
        p
    }

    fn window(&self, alpha: f64) -> Option<AveragingWindow> {
        (self.avg_width > 0.0).then_some(AveragingWindow {
            center_alpha: alpha,
            relative_halfwidth: self.avg_width,
            samples: self.avg_samples,
        })
    }

    fn t_or_tau(&self) -> Option<f64> {
        if self.mode == Mode::Deviation || self.rate {
            None
        } else {
            self.time
        }
    }

    fn value_kind(&self) -> ValueKind {
        match (self.mode, self.rate) {
            (Mode::Deviation, _) => ValueKind::Deviation,
            (_, true) => ValueKind::Rate,
            (_, false) => ValueKind::Probability,
        }
    }
}

fn required(v: Option<f64>, what: &str) -> Result<f64, Error> {
    v.ok_or_else(|| Error::Domain(format!("{what} is required")))
}

/// Evaluates one parameter point.
pub fn evaluate(p: &Point) -> Result<DecayResult, Error> {
    let fields = FieldParams::new(p.mass, p.lambda)?;
    match p.mode {
        Mode::Stationary => {
            let g = cavity_geometry(p.l, 0.0)?;
            if p.rate {
                decay_rate_stationary_longtime(&g, &fields)
            } else {
                decay_probability_stationary(&g, &fields, required(p.time, "--time")?, &p.quadrature)
            }
        }
        Mode::Accelerated => {
            let alpha = positive_alpha(p.alpha)?;
            let g = cavity_geometry(p.l, alpha)?;
            if !p.rate {
                return decay_probability_accelerated(&g, &fields, required(p.time, "--time")?, &p.quadrature);
            }
            match p.window(alpha) {
                Some(w) => averaged_decay_rate(&g, &fields, &w),
                None => decay_rate_accelerated_longtime(&g, &fields),
            }
        }
        Mode::Deviation => {
            let alpha = positive_alpha(p.alpha)?;
            let g = cavity_geometry(p.l, alpha)?;
            match p.window(alpha) {
                Some(w) => ideal_clock_deviation(&g, &fields, &w),
                None => pointwise_clock_deviation(&g, &fields),
            }
        }
    }
}

fn positive_alpha(alpha: Option<f64>) -> Result<f64, Error> {
    let a = required(alpha, "--alpha")?;
    if !(a > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {a}")));
    }
    Ok(a)
}

fn describe(d: &Diagnostics) -> String {
    let mut parts = vec![format!("evaluations={}", d.evaluations)];
    if let Some(c) = d.cutoff {
        parts.push(format!("cutoff={}", fmt_num(c)));
    }
    if let Some(n) = d.samples {
        parts.push(format!("samples={n}"));
    }
    if let (Some(lo), Some(hi)) = (d.window_min, d.window_max) {
        parts.push(format!("window_min={}", fmt_num(lo)));
        parts.push(format!("window_max={}", fmt_num(hi)));
    }
    parts.join(";")
}

/// Shortest round-trip representation, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// One CSV record for a point and its outcome.
pub fn record(p: &Point, outcome: &Result<DecayResult, Error>) -> Vec<String> {
    let alpha = match p.mode {
        Mode::Stationary => Some(0.0),
        _ => p.alpha,
    };
    let mut row = vec![
        p.mode.name().to_string(),
        fmt_num(p.l),
        fmt_num(p.mass),
        fmt_opt(alpha),
        fmt_num(p.lambda),
        fmt_opt(p.t_or_tau()),
    ];
    match outcome {
        Ok(r) => {
            let mut message = describe(&r.diagnostics);
            if p.mode == Mode::Stationary && p.rate && p.lambda > 0.0 {
                // rate over the small-cavity limit lambda^2 l^3 / (4 pi^2)
                let ratio = r.value * 4.0 * PI * PI / (p.lambda * p.lambda * p.l.powi(3));
                message.push_str(&format!(";small_cavity_ratio={}", fmt_num(ratio)));
            }
            row.extend([
                fmt_num(r.value),
                r.kind.name().to_string(),
                fmt_num(r.error_estimate),
                r.regime.name().to_string(),
                if r.diagnostics.converged { "ok" } else { "unconverged" }.to_string(),
                message,
            ]);
        }
        Err(e) => row.extend([
            String::new(),
            p.value_kind().name().to_string(),
            String::new(),
            String::new(),
            "error".to_string(),
            e.to_string(),
        ]),
    }
    row
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

/// Evaluates a single point or a sweep and writes CSV.
pub fn run_settings(s: &Settings) -> Result<i32, CliError> {
    let points: Vec<Point> = match s.sweep {
        Some(spec) => spec.values().into_iter().map(|v| s.point.with(spec.param, v)).collect(),
        None => vec![s.point.clone()],
    };
    let outcomes: Vec<Result<DecayResult, Error>> = points.par_iter().map(evaluate).collect();

    if s.sweep.is_none() {
        if let Err(e) = &outcomes[0] {
            return Err(CliError::Compute(e.clone()));
        }
    }

    let mut w = csv::Writer::from_writer(open_output(&s.output)?);
    w.write_record(CSV_HEADER)?;
    let mut code = EXIT_OK;
    for (p, o) in points.iter().zip(&outcomes) {
        w.write_record(record(p, o))?;
        if let Err(e) = o {
            if code == EXIT_OK {
                code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL };
            }
        }
    }
    w.flush()?;
    Ok(code)
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (mode, args) = match cli.command {
        Command::Verify(v) => return run_verify(&v),
        Command::Stationary(a) => (Mode::Stationary, a),
        Command::Accelerated(a) => (Mode::Accelerated, a),
        Command::Deviation(a) => (Mode::Deviation, a),
    };
    match resolve(mode, &args).and_then(|s| run_settings(&s)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qclock: {e}");
            e.exit_code()
        }
    }
}

fn run_verify(v: &VerifyArgs) -> i32 {
    let groups: Vec<verify::Group> = if v.only.is_empty() {
        verify::Group::ALL.to_vec()
    } else {
        v.only.clone()
    };
    let hooks = verify::Hooks { gamma_perturbation: v.perturb_gamma };
    let stdout = io::stdout();
    match verify::run(&groups, &hooks, &mut stdout.lock()) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => {
            eprintln!("qclock: {e}");
            EXIT_VERIFY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Settings {
        let cli = Cli::try_parse_from(std::iter::once("qclock").chain(args.iter().copied())).unwrap();
        match cli.command {
            Command::Stationary(a) => resolve(Mode::Stationary, &a).unwrap(),
            Command::Accelerated(a) => resolve(Mode::Accelerated, &a).unwrap(),
            Command::Deviation(a) => resolve(Mode::Deviation, &a).unwrap(),
            Command::Verify(_) => panic!("not a point command"),
        }
    }

    #[test]
    fn defaults_match_library() {
        let s = parse(&["deviation", "--alpha", "0.3"]);
        let p = &s.point;
        let w = AveragingWindow::new(0.3);
        let q = QuadratureConfig::default();
        assert_eq!(p.avg_width, w.relative_halfwidth);
        assert_eq!(p.avg_samples, w.samples);
        assert_eq!(p.quadrature, q);
        assert_eq!((p.l, p.mass, p.lambda), (defaults::L, defaults::MASS, defaults::LAMBDA));
        assert_eq!(s.output, None);
        assert_eq!(p.window(0.3), Some(w));
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# test\nl = 2\nmass=0.5\nrel_tol = 1e-6\nrate = true\n").unwrap();
        let s = parse(&["stationary", "--config", path.to_str().unwrap(), "--l", "3"]);
        assert_eq!(s.point.l, 3.0);
        assert_eq!(s.point.mass, 0.5);
        assert_eq!(s.point.quadrature.rel_tol, 1e-6);
        assert!(s.point.rate);

        fs::write(&path, "colour = blue\n").unwrap();
        let cli = Cli::try_parse_from(["qclock", "stationary", "--config", path.to_str().unwrap()]).unwrap();
        let Command::Stationary(a) = cli.command else { unreachable!() };
        assert!(matches!(resolve(Mode::Stationary, &a), Err(CliError::Usage(_))));
    }

    #[test]
    fn sweep_parsing() {
        let s = SweepSpec::parse("alpha:0.02:2.0:20:log").unwrap();
        let v = s.values();
        assert_eq!(v.len(), 20);
        assert_eq!(v[0], 0.02);
        assert_eq!(v[19], 2.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        let s = SweepSpec::parse("l:0.01:0.1:3:lin").unwrap();
        assert_eq!(s.values(), vec![0.01, 0.055, 0.1]);
        for bad in ["alpha:1:1:5:lin", "alpha:2:1:5:lin", "alpha:0:1:5:log", "alpha:0:1:1:lin", "beta:0:1:5:lin", "alpha:0:1"] {
            assert!(SweepSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn missing_required_parameters() {
        let cli = Cli::try_parse_from(["qclock", "accelerated", "--rate"]).unwrap();
        let Command::Accelerated(a) = cli.command else { unreachable!() };
        assert!(resolve(Mode::Accelerated, &a).is_err());
        let cli = Cli::try_parse_from(["qclock", "stationary"]).unwrap();
        let Command::Stationary(a) = cli.command else { unreachable!() };
        assert!(resolve(Mode::Stationary, &a).is_err());
    }

    #[test]
    fn point_records() {
        let s = parse(&["stationary", "--rate"]);
        let out = evaluate(&s.point);
        let row = record(&s.point, &out);
        assert_eq!(row.len(), CSV_HEADER.len());
        assert_eq!(row[0], "stationary");
        assert_eq!(row[5], "");
        assert!((row[6].parse::<f64>().unwrap() - 0.02810).abs() < 5e-6);
        assert_eq!(row[7], "rate");
        assert_eq!(row[10], "ok");

        let s = parse(&["stationary", "--rate", "--mass", "4"]);
        assert_eq!(evaluate(&s.point).unwrap().value, 0.0);

        let s = parse(&["accelerated", "--alpha", "2.1", "--rate"]);
        let e = evaluate(&s.point).unwrap_err();
        assert!(e.is_validation());
        assert!(e.to_string().contains("horizon"));
        let row = record(&s.point, &Err(e));
        assert_eq!(row[10], "error");
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.0, 1.0, 0.028103438618244714, 2.5e-8, 9.98e-17, -3.0e20, 123456.789] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_num(2.5e-8), "2.5e-8");
        assert_eq!(fmt_num(0.5), "0.5");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["qclock", "accelerated", "--alpha", "2.1", "--rate"]), EXIT_VALIDATION);
        assert_eq!(main_with_args(["qclock", "stationary", "--bogus"]), EXIT_VALIDATION);
        assert_eq!(main_with_args(["qclock", "stationary", "--sweep", "l:1:1:3:lin", "--rate"]), EXIT_VALIDATION);
        assert_eq!(main_with_args(["qclock", "verify", "--only", "gamma", "--perturb-gamma", "0.01"]), EXIT_VERIFY);
        assert_eq!(main_with_args(["qclock", "verify", "--only", "gamma"]), EXIT_OK);
    }
}
