//! Command-line front end: Choi dynamics curves, ESD times, parameter sweeps,
//! factorization checks and n-qubit certificates, written as CSV or JSON.
//!
//! Options come from flags and from an optional `key = value` file given
//! with `--config`; flags win. Exit codes: 0 success, 1 I/O failure,
//! 2 invalid input, 3 tolerance failure in a check command.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::channels::BathParams;
use crate::entanglement::{concurrence, factorization_terms, PPT_TOL};
use crate::channels::choi;
use crate::error::Error;
use crate::esd::{choi_ppt_time, nqubit_esd_certificate, ChannelFamily, DephasingProfile, EsdReport, DEFAULT_PRECISION};
use crate::states::random_pure;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

const FACTORIZATION_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "lindblad-esd", version, about = "Entanglement sudden death under local Lindblad baths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimum PT eigenvalue, negativity and concurrence of the Choi state over a time grid.
    ChoiDynamics(Opts),
    /// Choi separability transition time.
    EsdTime(Opts),
    /// ESD time over a grid of one bath parameter.
    Sweep(Opts),
    /// Factorization-law residuals for random d⊗2 pure states.
    FactorizationCheck(Opts),
    /// Per-cut negativities of GHZ, W and random n-qubit states at the ESD time.
    NqubitCert(Opts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::ChoiDynamics(_) => "choi-dynamics",
            Self::EsdTime(_) => "esd-time",
            Self::Sweep(_) => "sweep",
            Self::FactorizationCheck(_) => "factorization-check",
            Self::NqubitCert(_) => "nqubit-cert",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Self::ChoiDynamics(o) | Self::EsdTime(o) | Self::Sweep(o) | Self::FactorizationCheck(o) | Self::NqubitCert(o) => o,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Thermal,
    Squeezed,
    Qnd,
    /// The identity channel (QND with no dephasing).
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Lin,
    Geo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GProfile {
    Linear,
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Axis {
    #[value(name = "N")]
    #[serde(rename = "N")]
    NMean,
    #[value(name = "N_th")]
    #[serde(rename = "N_th")]
    NTh,
    #[value(name = "r")]
    #[serde(rename = "r")]
    R,
    #[value(name = "gamma")]
    #[serde(rename = "gamma")]
    Gamma,
}

/// Flags shared by every subcommand; unset values may come from `--config`.
#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// Plain-text `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyTag>,
    /// Decay rate (gamma_0 for the squeezed bath).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Effective occupation N.
    #[arg(long = "n-mean")]
    pub n_mean: Option<f64>,
    /// Thermal photon number N_th.
    #[arg(long = "n-th")]
    pub n_th: Option<f64>,
    /// Squeezing magnitude.
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeezing phase.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Qubit frequency.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Cross-coherence phase of the squeezed propagator (defaults to -phi).
    #[arg(long = "squeeze-phase", allow_hyphen_values = true)]
    pub squeeze_phase: Option<f64>,
    /// QND dephasing exponent shape: g(t) = scale * t or scale * t^2.
    #[arg(long = "g-profile", value_enum)]
    pub g_profile: Option<GProfile>,
    #[arg(long = "g-scale")]
    pub g_scale: Option<f64>,
    #[arg(long = "t-start")]
    pub t_start: Option<f64>,
    #[arg(long = "t-stop")]
    pub t_stop: Option<f64>,
    #[arg(long = "t-points")]
    pub t_points: Option<usize>,
    #[arg(long, value_enum)]
    pub grid: Option<GridKind>,
    /// Largest time scanned (defaults to 100 / (gamma (2N+1)), or 100 for QND).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Bisection precision.
    #[arg(long)]
    pub precision: Option<f64>,
    /// Side-A dimension for the factorization check.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "n-qubits")]
    pub n_qubits: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sweep axis.
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    /// Comma-separated sweep values.
    #[arg(long)]
    pub values: Option<String>,
    /// Evaluation time for the factorization check.
    #[arg(long)]
    pub time: Option<f64>,
    /// Tolerance for check commands.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Failure categories, each mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Invalid(String),
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => EXIT_IO,
            Self::Invalid(_) => EXIT_INVALID,
            Self::Tolerance(_) => EXIT_TOLERANCE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Io(m) => write!(f, "I/O error: {m}"),
            Self::Invalid(m) => write!(f, "invalid input: {m}"),
            Self::Tolerance(m) => write!(f, "tolerance failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

macro_rules! fill_from_file {
    ($opts:expr, $key:ident, $value:ident, { $($name:literal => $field:ident),* $(,)? }) => {
        match $key.as_str() {
            $($name => {
                if $opts.$field.is_none() {
                    $opts.$field = Some(parse_value($name, $value)?);
                }
            })*
            "config" => return Err(invalid("config files cannot include other config files")),
            other => return Err(invalid(format!("unknown config key '{other}'"))),
        }
    };
}

trait ConfigValue: Sized {
    fn parse_config(s: &str) -> Option<Self>;
}

macro_rules! from_str_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_config(s: &str) -> Option<Self> {
                s.parse().ok()
            }
        }
    )*};
}
from_str_value!(f64, usize, u64, String, PathBuf);

macro_rules! enum_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_config(s: &str) -> Option<Self> {
                <$t as ValueEnum>::from_str(s, false).ok()
            }
        }
    )*};
}
enum_value!(FamilyTag, GridKind, Format, GProfile, Axis);

fn parse_value<T: ConfigValue>(key: &str, value: &str) -> Result<T, CliError> {
    T::parse_config(value).ok_or_else(|| invalid(format!("config key '{key}': cannot parse '{value}'")))
}

impl Opts {
    /// Fills unset options from a `key = value` file (`#` starts a comment).
    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(invalid(format!("{}:{}: expected key = value", path.display(), lineno + 1)));
            };
            let key = k.trim().replace('_', "-");
            let value = v.trim();
            fill_from_file!(self, key, value, {
                "family" => family,
                "gamma" => gamma,
                "n-mean" => n_mean,
                "n-th" => n_th,
                "r" => r,
                "phi" => phi,
                "omega" => omega,
                "squeeze-phase" => squeeze_phase,
                "g-profile" => g_profile,
                "g-scale" => g_scale,
                "t-start" => t_start,
                "t-stop" => t_stop,
                "t-points" => t_points,
                "grid" => grid,
                "horizon" => horizon,
                "precision" => precision,
                "d" => d,
                "samples" => samples,
                "n-qubits" => n_qubits,
                "seed" => seed,
                "out" => out,
                "format" => format,
                "workers" => workers,
                "axis" => axis,
                "values" => values,
                "time" => time,
                "tol" => tol,
            });
        }
        Ok(())
    }
}

/// Fully resolved run configuration; serialized into JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub family: FamilyTag,
    pub gamma: f64,
    pub n_mean: f64,
    pub n_th: f64,
    pub r: f64,
    pub phi: f64,
    pub omega: f64,
    pub squeeze_phase: f64,
    pub g_profile: GProfile,
    pub g_scale: f64,
    pub t_start: f64,
    pub t_stop: f64,
    pub t_points: usize,
    pub grid: GridKind,
    pub horizon: f64,
    pub precision: f64,
    pub d: usize,
    pub samples: usize,
    pub n_qubits: usize,
    pub seed: u64,
    pub format: Format,
    pub workers: usize,
    pub axis: Option<Axis>,
    pub values: Vec<f64>,
    pub time: f64,
    pub tol: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    params: Option<BathParams>,
}

impl RunConfig {
    pub fn resolve(command: &str, opts: &Opts) -> Result<Self, CliError> {
        let family = opts.family.unwrap_or(FamilyTag::Thermal);
        let gamma = opts.gamma.unwrap_or(1.0);
        let r = opts.r.unwrap_or(0.0);
        let phi = opts.phi.unwrap_or(0.0);
        let omega = opts.omega.unwrap_or(0.0);
        let params = match family {
            FamilyTag::Thermal => {
                if r != 0.0 {
                    return Err(invalid(format!("thermal family requires r = 0, got r = {r}; use --family squeezed")));
                }
                let n_mean = opts.n_mean.or(opts.n_th).unwrap_or(0.0);
                Some(BathParams::from_fields(gamma, Some(n_mean), opts.n_th, 0.0, phi, omega)?)
            }
            FamilyTag::Squeezed => {
                let mut p = BathParams::from_fields(gamma, opts.n_mean, opts.n_th, r, phi, omega)?;
                if let Some(phase) = opts.squeeze_phase {
                    p = p.with_squeeze_phase(phase);
                    p.validate()?;
                }
                Some(p)
            }
            FamilyTag::Qnd | FamilyTag::Identity => None,
        };
        let g_scale = opts.g_scale.unwrap_or(1.0);
        if !(g_scale >= 0.0 && g_scale.is_finite()) {
            return Err(invalid(format!("--g-scale {g_scale} must be a finite value >= 0")));
        }
        let default_horizon = match params {
            Some(p) => 100.0 / p.relaxation_rate(),
            None => 100.0,
        };
        let horizon = opts.horizon.unwrap_or(default_horizon);
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("--horizon {horizon} must be positive")));
        }
        let precision = opts.precision.unwrap_or(DEFAULT_PRECISION);
        if !(precision > 0.0) {
            return Err(invalid(format!("--precision {precision} must be positive")));
        }
        let t_start = opts.t_start.unwrap_or(0.0);
        let t_stop = opts.t_stop.unwrap_or(10.0);
        let t_points = opts.t_points.unwrap_or(101);
        let grid = opts.grid.unwrap_or(GridKind::Lin);
        if t_points < 2 {
            return Err(invalid(format!("--t-points {t_points} must be at least 2")));
        }
        if !(t_start >= 0.0 && t_stop > t_start && t_stop.is_finite()) {
            return Err(invalid(format!("time grid must satisfy 0 <= t-start < t-stop, got {t_start} .. {t_stop}")));
        }
        if grid == GridKind::Geo && t_start <= 0.0 {
            return Err(invalid("geometric time grid needs t-start > 0"));
        }
        let values = match &opts.values {
            Some(s) => s
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| invalid(format!("--values: cannot parse '{v}'"))))
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let format = match (opts.format, &opts.out) {
            (Some(f), _) => f,
            (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => Format::Json,
            _ => Format::Csv,
        };
        let workers = opts.workers.unwrap_or(1);
        if workers == 0 {
            return Err(invalid("--workers must be at least 1"));
        }
        let time = opts.time.unwrap_or(0.4);
        if !(time >= 0.0 && time.is_finite()) {
            return Err(invalid(format!("--time {time} must be >= 0")));
        }
        let default_tol = if command == "factorization-check" { FACTORIZATION_TOL } else { PPT_TOL };
        let tol = opts.tol.unwrap_or(default_tol);
        if !(tol >= 0.0) {
            return Err(invalid(format!("--tol {tol} must be >= 0")));
        }
        Ok(Self {
            command: command.to_string(),
            family,
            gamma,
            n_mean: params.map_or(0.0, |p| p.n_mean()),
            n_th: params.map_or(0.0, |p| p.n_th()),
            r,
            phi,
            omega,
            squeeze_phase: params.map_or(-phi, |p| p.squeeze_phase()),
            g_profile: opts.g_profile.unwrap_or(GProfile::Quadratic),
            g_scale,
            t_start,
            t_stop,
            t_points,
            grid,
            horizon,
            precision,
            d: opts.d.unwrap_or(2),
            samples: opts.samples.unwrap_or(200),
            n_qubits: opts.n_qubits.unwrap_or(3),
            seed: opts.seed.unwrap_or(0),
            format,
            workers,
            axis: opts.axis,
            values,
            time,
            tol,
            out: opts.out.clone(),
            params,
        })
    }

    pub fn channel_family(&self) -> ChannelFamily {
        match (self.family, self.params) {
            (FamilyTag::Thermal, Some(p)) => ChannelFamily::Thermal(p),
            (FamilyTag::Squeezed, Some(p)) => ChannelFamily::Squeezed(p),
            (FamilyTag::Identity, _) => ChannelFamily::Qnd { omega: 0.0, profile: DephasingProfile::Linear { scale: 0.0 } },
            _ => {
                let profile = match self.g_profile {
                    GProfile::Linear => DephasingProfile::Linear { scale: self.g_scale },
                    GProfile::Quadratic => DephasingProfile::Quadratic { scale: self.g_scale },
                };
                ChannelFamily::Qnd { omega: self.omega, profile }
            }
        }
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.t_points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    return self.t_stop;
                }
                let f = k as f64 / last;
                match self.grid {
                    GridKind::Lin => self.t_start + f * (self.t_stop - self.t_start),
                    GridKind::Geo => self.t_start * (self.t_stop / self.t_start).powf(f),
                }
            })
            .collect()
    }
}

/// One output cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    /// A time that may be absent, rendered as `never`.
    Time(Option<f64>),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) | Cell::Time(Some(x)) => format_csv_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Time(None) => "never".into(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) | Cell::Time(Some(x)) => json_number(*x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Time(None) => json!("never"),
        }
    }
}

fn format_csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        non_finite_label(x).to_string()
    }
}

fn non_finite_label(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(non_finite_label(x))
    }
}

/// A rendered table plus an optional summary object.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Option<Value>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self, config: &RunConfig) -> Result<String, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("config".into(), serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?);
        top.insert("rows".into(), Value::Array(rows));
        if let Some(s) = &self.summary {
            top.insert("summary".into(), s.clone());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}

/// Result of a command: the table and, for check commands, a tolerance verdict.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<String>,
}

pub fn choi_dynamics(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = cfg.channel_family();
    let rows = cfg
        .time_grid()
        .into_iter()
        .map(|t| {
            let probe = family.pt_probe(t)?;
            let v = family.superoperator(t)?;
            let conc = concurrence(&choi(&v))?.value();
            let neg = if probe.log_margin < 0.0 { probe.min_eigenvalue_ln_abs.exp() } else { 0.0 };
            Ok(vec![
                Cell::Num(t),
                Cell::Num(probe.min_eigenvalue),
                Cell::Num(probe.min_eigenvalue_ln_abs),
                Cell::Num(probe.log_margin),
                Cell::Num(neg),
                Cell::Num(conc),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Outcome {
        table: Table {
            header: vec!["t", "min_pt_eigenvalue", "ln_abs_min_pt_eigenvalue", "log_margin", "negativity", "concurrence"],
            rows,
            summary: None,
        },
        failure: None,
    })
}

const REPORT_HEADER: [&str; 13] = [
    "family",
    "transition_time",
    "t_low",
    "t_high",
    "horizon",
    "precision",
    "iterations",
    "single_crossing",
    "min_pt_eigenvalue_at_horizon",
    "log_margin_at_horizon",
    "relaxation_rate",
    "x_state_closed_form",
    "printed_closed_form",
];

fn report_cells(report: &EsdReport, rate: Option<f64>) -> Vec<Cell> {
    let closed = |label: &str| {
        report.closed_forms.iter().find(|c| c.label == label).map_or(Cell::Text(String::new()), |c| Cell::Time(c.time))
    };
    vec![
        Cell::Text(report.family.to_string()),
        Cell::Time(report.transition_time),
        report.bracket.map_or(Cell::Text(String::new()), |b| Cell::Num(b.t_low)),
        report.bracket.map_or(Cell::Text(String::new()), |b| Cell::Num(b.t_high)),
        Cell::Num(report.horizon),
        Cell::Num(report.precision),
        Cell::Int(report.iterations as u64),
        Cell::Bool(report.single_crossing),
        Cell::Num(report.min_pt_eigenvalue_at_horizon),
        Cell::Num(report.log_margin_at_horizon),
        rate.map_or(Cell::Text(String::new()), Cell::Num),
        closed("x-state condition"),
        closed("printed sinh threshold"),
    ]
}

fn to_json_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

pub fn esd_time(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = choi_ppt_time(&cfg.channel_family(), cfg.horizon, cfg.precision)?;
    let rate = cfg.params.map(|p| p.relaxation_rate());
    Ok(Outcome {
        table: Table {
            header: REPORT_HEADER.to_vec(),
            rows: vec![report_cells(&report, rate)],
            summary: Some(to_json_value(&report)?),
        },
        failure: None,
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let axis = cfg.axis.ok_or_else(|| invalid("sweep needs --axis (N, N_th, r or gamma)"))?;
    if cfg.values.is_empty() {
        return Err(invalid("sweep needs --values"));
    }
    let base = cfg.params.ok_or_else(|| invalid("sweep supports the thermal and squeezed families"))?;
    let point = |v: f64| -> Result<BathParams, Error> {
        let p = match axis {
            Axis::NMean => BathParams::from_fields(base.gamma(), Some(v), None, base.r(), base.phi(), base.omega()),
            Axis::NTh => BathParams::from_fields(base.gamma(), None, Some(v), base.r(), base.phi(), base.omega()),
            Axis::R => BathParams::from_fields(base.gamma(), None, Some(base.n_th()), v, base.phi(), base.omega()),
            Axis::Gamma => {
                BathParams::from_fields(v, Some(base.n_mean()), Some(base.n_th()), base.r(), base.phi(), base.omega())
            }
        }?;
        match cfg.family {
            FamilyTag::Squeezed if base.squeeze_phase() != -base.phi() => Ok(p.with_squeeze_phase(base.squeeze_phase())),
            _ => Ok(p),
        }
    };
    let params: Vec<BathParams> = cfg
        .values
        .iter()
        .map(|&v| point(v).map_err(|e| invalid(format!("sweep value {v}: {e}"))))
        .collect::<Result<_, _>>()?;
    let horizon_fixed = cfg.horizon;
    let run = |p: &BathParams| -> Result<EsdReport, Error> {
        let family = if p.r() > 0.0 || cfg.family == FamilyTag::Squeezed {
            ChannelFamily::Squeezed(*p)
        } else {
            ChannelFamily::Thermal(*p)
        };
        choi_ppt_time(&family, horizon_fixed, cfg.precision)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let reports: Vec<EsdReport> = pool.install(|| params.par_iter().map(run).collect::<Result<Vec<_>, Error>>())?;

    let mut header = vec!["index", "axis_value", "gamma", "n_mean", "n_th", "r"];
    header.extend(REPORT_HEADER);
    header.push("scaled_transition_time");
    let rows = params
        .iter()
        .zip(&reports)
        .enumerate()
        .map(|(k, (p, rep))| {
            let mut row = vec![
                Cell::Int(k as u64),
                Cell::Num(cfg.values[k]),
                Cell::Num(p.gamma()),
                Cell::Num(p.n_mean()),
                Cell::Num(p.n_th()),
                Cell::Num(p.r()),
            ];
            row.extend(report_cells(rep, Some(p.relaxation_rate())));
            row.push(Cell::Time(rep.transition_time.map(|t| t * p.relaxation_rate())));
            row
        })
        .collect();
    Ok(Outcome { table: Table { header, rows, summary: None }, failure: None })
}

pub fn factorization_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !(2..=4).contains(&cfg.d) {
        return Err(invalid(format!("--d {} must be 2, 3 or 4", cfg.d)));
    }
    if cfg.samples == 0 {
        return Err(invalid("--samples must be at least 1"));
    }
    let v = cfg.channel_family().superoperator(cfg.time)?;
    let d = cfg.d;
    let terms = (0..cfg.samples)
        .map(|k| factorization_terms(&random_pure(&[d, 2], cfg.seed.wrapping_add(k as u64)), &v))
        .collect::<Result<Vec<_>, Error>>()?;
    let max_residual = terms.iter().map(|t| t.residual).fold(0.0, f64::max);
    let rows = terms
        .iter()
        .enumerate()
        .map(|(k, t)| {
            vec![Cell::Int(k as u64), Cell::Num(t.evolved), Cell::Num(t.initial), Cell::Num(t.channel), Cell::Num(t.residual)]
        })
        .collect();
    let failure = (max_residual > cfg.tol)
        .then(|| format!("max factorization residual {max_residual:.3e} exceeds tolerance {:.3e}", cfg.tol));
    Ok(Outcome {
        table: Table {
            header: vec!["sample", "evolved_concurrence", "initial_concurrence", "channel_concurrence", "residual"],
            rows,
            summary: Some(json!({ "max_residual": json_number(max_residual), "tolerance": cfg.tol, "passed": failure.is_none() })),
        },
        failure,
    })
}

pub fn nqubit_cert(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !(2..=6).contains(&cfg.n_qubits) {
        return Err(invalid(format!("--n-qubits {} must lie in [2, 6]", cfg.n_qubits)));
    }
    let cert = nqubit_esd_certificate(cfg.n_qubits, &cfg.channel_family(), cfg.horizon, cfg.precision, cfg.seed)?;
    let mut rows = Vec::new();
    for sample in cert.samples.iter().chain(cert.ghz_before.iter()) {
        for (cut, neg) in sample.cuts.iter().zip(&sample.negativities) {
            let label: String = cut.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
            rows.push(vec![Cell::Text(sample.label.clone()), Cell::Num(sample.time), Cell::Text(label), Cell::Num(*neg)]);
        }
    }
    let failure = (cert.report.transition_time.is_some() && !cert.certified).then(|| {
        format!(
            "certificate failed: max negativity {:.3e}, entanglement breaking {:?}",
            cert.max_negativity, cert.entanglement_breaking
        )
    });
    let summary = json!({
        "transition_time": cert.report.transition_time.map_or(json!("never"), json_number),
        "certified": cert.certified,
        "entanglement_breaking": cert.entanglement_breaking,
        "max_negativity": json_number(cert.max_negativity),
        "report": to_json_value(&cert.report)?,
    });
    Ok(Outcome {
        table: Table { header: vec!["sample", "t", "cut", "negativity"], rows, summary: Some(summary) },
        failure,
    })
}

/// Runs a parsed command and writes its output; returns the exit code.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let command = cli.command.name();
    let mut opts = cli.command.opts().clone();
    if let Some(path) = opts.config.clone() {
        opts.merge_file(&path)?;
    }
    let cfg = RunConfig::resolve(command, &opts)?;
    let outcome = match &cli.command {
        Command::ChoiDynamics(_) => choi_dynamics(&cfg)?,
        Command::EsdTime(_) => esd_time(&cfg)?,
        Command::Sweep(_) => sweep(&cfg)?,
        Command::FactorizationCheck(_) => factorization_check(&cfg)?,
        Command::NqubitCert(_) => nqubit_cert(&cfg)?,
    };
    let text = match cfg.format {
        Format::Csv => outcome.table.to_csv()?,
        Format::Json => outcome.table.to_json(&cfg)?,
    };
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    if let Some(summary) = &outcome.table.summary {
        if cfg.format == Format::Csv && cfg.out.is_some() {
            eprintln!("{summary}");
        }
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Tolerance(msg)),
        None => Ok(()),
    }
}

/// Entry point used by the binary: parses `args`, runs, and maps failures to exit codes.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("lindblad-esd: {e}");
            e.exit_code()
        }
    }
}
