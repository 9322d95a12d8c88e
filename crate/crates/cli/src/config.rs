//! Run configuration and the per-command parameter schemas.
//!
//! Parameters arrive as a string map (from `--key value` pairs or a JSON
//! file) and are validated into a typed [`Job`] before anything is computed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use barrier_spectra_core::asymptotics::{PredictionWindow, DEFAULT_EPSILON};
use barrier_spectra_core::functionals::SumSpec;
use barrier_spectra_core::jacobi::default_tolerance;
use barrier_spectra_core::schrodinger::SeedWindow;
use clap::ValueEnum;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{invalid, CliError};

/// Smallest grid accepted for region contours.
pub const MIN_CONTOUR_GRID: u32 = 256;
/// Largest barrier length accepted on the command line.
pub const MAX_N: u32 = 20_000;
/// Default certification tolerance for the continuous problem.
pub const DEFAULT_CONTINUOUS_TOL: f64 = 1e-9;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    JacobiSpectrum,
    SchrodingerSpectrum,
    LtScanDiscrete,
    LtScanContinuous,
    AsymptoticsCheck,
    Figure1,
    Figure2,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::JacobiSpectrum,
        Command::SchrodingerSpectrum,
        Command::LtScanDiscrete,
        Command::LtScanContinuous,
        Command::AsymptoticsCheck,
        Command::Figure1,
        Command::Figure2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::JacobiSpectrum => "jacobi-spectrum",
            Command::SchrodingerSpectrum => "schrodinger-spectrum",
            Command::LtScanDiscrete => "lt-scan-discrete",
            Command::LtScanContinuous => "lt-scan-continuous",
            Command::AsymptoticsCheck => "asymptotics-check",
            Command::Figure1 => "figure1",
            Command::Figure2 => "figure2",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, deserialize_with = "parameters_from_json")]
    pub parameters: BTreeMap<String, String>,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<Format>,
}

impl RunConfig {
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            output_dir: output_dir.into(),
            formats: [Format::Csv, Format::Json, Format::Svg]
                .into_iter()
                .collect(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_formats(mut self, formats: impl IntoIterator<Item = Format>) -> Self {
        self.formats = formats.into_iter().collect();
        self
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }
}

/// Accepts numbers, booleans and arrays in a JSON config and stores them in
/// the same textual form the command line uses.
fn parameters_from_json<'de, D>(deserializer: D) -> Result<BTreeMap<String, String>, D::Error>
where
    D: Deserializer<'de>,
{
    use serde::de::Error;
    let raw = BTreeMap::<String, serde_json::Value>::deserialize(deserializer)?;
    raw.into_iter()
        .map(|(k, v)| {
            let text = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|item| match item {
                        serde_json::Value::String(s) => Ok(s.clone()),
                        serde_json::Value::Number(n) => Ok(n.to_string()),
                        other => Err(D::Error::custom(format!("unsupported list item {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?
                    .join(","),
                other => {
                    return Err(D::Error::custom(format!(
                        "unsupported value {other} for {k}"
                    )))
                }
            };
            Ok((k, text))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    IntList,
    FloatList,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn param(
    name: &'static str,
    kind: Kind,
    default: Option<&'static str>,
    help: &'static str,
) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        default,
        help,
    }
}

const WINDOW_PARAMS: [ParamSpec; 3] = [
    param("alpha", Kind::Float, Some("0.01"), "lower window exponent"),
    param("beta", Kind::Float, Some("0.03"), "upper window exponent"),
    param(
        "gamma",
        Kind::Float,
        Some("0.015"),
        "seed accuracy exponent",
    ),
];

/// Accepted parameters of a command.
pub fn schema(command: Command) -> Vec<ParamSpec> {
    let mut specs = match command {
        Command::JacobiSpectrum => vec![
            param("n", Kind::Int, None, "barrier length"),
            param("h", Kind::Float, None, "coupling, beta = ih"),
            param("tol", Kind::Float, None, "root backward-error tolerance"),
        ],
        Command::SchrodingerSpectrum => vec![
            param("h", Kind::Float, None, "coupling of the barrier"),
            param(
                "tol",
                Kind::Float,
                Some("1e-9"),
                "relative residual tolerance",
            ),
            param(
                "scope",
                Kind::Choice(&["window", "full"]),
                Some("window"),
                "seed window only, or every root up to the admissibility edge",
            ),
        ],
        Command::LtScanDiscrete => vec![
            param("p", Kind::Float, None, "exponent of the potential norm"),
            param(
                "omega",
                Kind::Float,
                None,
                "exponent of the distance-only sum",
            ),
            param(
                "sigma",
                Kind::Float,
                None,
                "exponent of the band-edge weight",
            ),
            param(
                "tau",
                Kind::Float,
                None,
                "extra distance exponent of the edge-weighted sum",
            ),
            param(
                "n_list",
                Kind::IntList,
                None,
                "comma-separated barrier lengths",
            ),
        ],
        Command::LtScanContinuous => vec![
            param("p", Kind::Float, None, "exponent"),
            param("sigma", Kind::Float, None, "weight exponent"),
            param("h_list", Kind::FloatList, None, "comma-separated couplings"),
            param(
                "tol",
                Kind::Float,
                Some("1e-9"),
                "relative residual tolerance",
            ),
        ],
        Command::AsymptoticsCheck => vec![
            param(
                "n_list",
                Kind::IntList,
                None,
                "comma-separated barrier lengths",
            ),
            param(
                "window",
                Kind::Choice(&["central", "extended"]),
                Some("central"),
                "index window of the predictions",
            ),
            param(
                "epsilon",
                Kind::Float,
                Some("0.05"),
                "trimming of the extended window",
            ),
        ],
        Command::Figure1 => vec![
            param("n", Kind::Int, Some("39"), "barrier length"),
            param("h", Kind::Float, Some("0.1"), "coupling, beta = ih"),
            param("grid", Kind::Int, Some("512"), "contour grid resolution"),
        ],
        Command::Figure2 => vec![
            param("h", Kind::Float, Some("2500"), "coupling of the barrier"),
            param(
                "tol",
                Kind::Float,
                Some("1e-9"),
                "relative residual tolerance",
            ),
        ],
    };
    if matches!(
        command,
        Command::SchrodingerSpectrum | Command::LtScanContinuous
    ) {
        specs.extend(WINDOW_PARAMS);
    }
    specs
}

/// A validated command with typed parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    JacobiSpectrum {
        n: u32,
        h: f64,
        tol: f64,
    },
    SchrodingerSpectrum {
        h: f64,
        window: SeedWindow,
        tol: f64,
        full: bool,
    },
    LtScanDiscrete {
        spec: SumSpec,
        n_list: Vec<u32>,
    },
    LtScanContinuous {
        p: f64,
        sigma: f64,
        h_list: Vec<f64>,
        window: SeedWindow,
        tol: f64,
    },
    AsymptoticsCheck {
        n_list: Vec<u32>,
        window: PredictionWindow,
    },
    Figure1 {
        n: u32,
        h: f64,
        grid: u32,
    },
    Figure2 {
        h: f64,
        tol: f64,
    },
}

struct Params<'a> {
    command: Command,
    values: BTreeMap<&'static str, &'a str>,
}

impl Params<'_> {
    fn raw(&self, name: &str) -> Option<&str> {
        self.values.get(name).copied()
    }

    fn float(&self, name: &str) -> Result<Option<f64>, CliError> {
        self.raw(name).map(|v| parse_float(name, v)).transpose()
    }

    fn positive(&self, name: &str) -> Result<f64, CliError> {
        match self.float(name)? {
            Some(v) if v > 0.0 => Ok(v),
            Some(v) => invalid(format!("{name} must be positive, got {v}")),
            None => invalid(format!("{} requires --{name}", self.command)),
        }
    }

    fn barrier_length(&self, name: &str) -> Result<u32, CliError> {
        match self.raw(name) {
            Some(v) => parse_length(name, v),
            None => invalid(format!("{} requires --{name}", self.command)),
        }
    }

    fn lengths(&self, name: &str) -> Result<Vec<u32>, CliError> {
        let list = self
            .raw(name)
            .ok_or_else(|| CliError::Validation(format!("{} requires --{name}", self.command)))?;
        split_list(list).map(|v| parse_length(name, v)).collect()
    }

    fn window(&self) -> Result<SeedWindow, CliError> {
        let get = |name| self.float(name).map(|v| v.unwrap_or_default());
        SeedWindow::new(get("alpha")?, get("beta")?, get("gamma")?)
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}

fn parse_float(name: &str, value: &str) -> Result<f64, CliError> {
    match value.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => invalid(format!("{name} must be a finite number, got {value:?}")),
    }
}

fn parse_length(name: &str, value: &str) -> Result<u32, CliError> {
    match value.trim().parse::<u32>() {
        Ok(n) if (2..=MAX_N).contains(&n) => Ok(n),
        _ => invalid(format!(
            "{name} must be an integer in 2..={MAX_N}, got {value:?}"
        )),
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Checks names, types and cross-parameter constraints of `config`.
pub fn validate(config: &RunConfig) -> Result<Job, CliError> {
    let specs = schema(config.command);
    for key in config.parameters.keys() {
        if !specs.iter().any(|s| s.name == key) {
            let known: Vec<&str> = specs.iter().map(|s| s.name).collect();
            return invalid(format!(
                "unknown parameter {key:?} for {} (accepted: {})",
                config.command,
                known.join(", ")
            ));
        }
    }
    if config.formats.is_empty() {
        return invalid("at least one output format is required");
    }
    let mut values = BTreeMap::new();
    for spec in &specs {
        let value = match config.parameters.get(spec.name) {
            Some(v) => v.as_str(),
            None => match spec.default {
                Some(d) => d,
                None => continue,
            },
        };
        check_kind(spec, value)?;
        values.insert(spec.name, value);
    }
    let params = Params {
        command: config.command,
        values,
    };

    Ok(match config.command {
        Command::JacobiSpectrum => {
            let n = params.barrier_length("n")?;
            let h = params.positive("h")?;
            let tol = match params.float("tol")? {
                Some(t) if t > 0.0 => t,
                Some(t) => return invalid(format!("tol must be positive, got {t}")),
                None => default_tolerance(n),
            };
            Job::JacobiSpectrum { n, h, tol }
        }
        Command::SchrodingerSpectrum => Job::SchrodingerSpectrum {
            h: params.positive("h")?,
            window: params.window()?,
            tol: params.positive("tol")?,
            full: params.raw("scope") == Some("full"),
        },
        Command::LtScanDiscrete => {
            let p = params
                .float("p")?
                .ok_or_else(|| CliError::Validation("lt-scan-discrete requires --p".into()))?;
            let spec = SumSpec::new(
                p,
                params.float("omega")?,
                params.float("sigma")?,
                params.float("tau")?,
            )
            .map_err(|e| CliError::Validation(e.to_string()))?;
            Job::LtScanDiscrete {
                spec,
                n_list: params.lengths("n_list")?,
            }
        }
        Command::LtScanContinuous => {
            let p = params.positive("p")?;
            let sigma = params.positive("sigma")?;
            if !(p >= 1.0 && sigma >= 0.5) {
                return invalid(format!(
                    "need p >= 1 and sigma >= 1/2, got p={p}, sigma={sigma}"
                ));
            }
            let list = params.raw("h_list").ok_or_else(|| {
                CliError::Validation("lt-scan-continuous requires --h_list".into())
            })?;
            let h_list = split_list(list)
                .map(|v| match parse_float("h_list", v)? {
                    h if h > 0.0 => Ok(h),
                    h => invalid(format!("h_list entries must be positive, got {h}")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Job::LtScanContinuous {
                p,
                sigma,
                h_list,
                window: params.window()?,
                tol: params.positive("tol")?,
            }
        }
        Command::AsymptoticsCheck => {
            let window = match params.raw("window") {
                Some("extended") => {
                    let epsilon = params.float("epsilon")?.unwrap_or(DEFAULT_EPSILON);
                    if !(epsilon > 0.0 && epsilon < 0.5) {
                        return invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}"));
                    }
                    PredictionWindow::Extended { epsilon }
                }
                _ => PredictionWindow::Central,
            };
            Job::AsymptoticsCheck {
                n_list: params.lengths("n_list")?,
                window,
            }
        }
        Command::Figure1 => {
            let grid = params
                .raw("grid")
                .and_then(|g| g.trim().parse::<u32>().ok())
                .unwrap_or(0);
            if !(MIN_CONTOUR_GRID..=8192).contains(&grid) {
                return invalid(format!(
                    "grid must be an integer in {MIN_CONTOUR_GRID}..=8192"
                ));
            }
            Job::Figure1 {
                n: params.barrier_length("n")?,
                h: params.positive("h")?,
                grid,
            }
        }
        Command::Figure2 => Job::Figure2 {
            h: params.positive("h")?,
            tol: params.positive("tol")?,
        },
    })
}

fn check_kind(spec: &ParamSpec, value: &str) -> Result<(), CliError> {
    let name = spec.name;
    match spec.kind {
        Kind::Int => {
            if value.trim().parse::<i64>().is_err() {
                return invalid(format!("{name} must be an integer, got {value:?}"));
            }
        }
        Kind::Float => {
            parse_float(name, value)?;
        }
        Kind::IntList | Kind::FloatList => {
            let items: Vec<&str> = split_list(value).collect();
            if items.is_empty() {
                return invalid(format!("{name} must be a non-empty comma-separated list"));
            }
            for item in items {
                if spec.kind == Kind::IntList && item.parse::<i64>().is_err() {
                    return invalid(format!("{name} entries must be integers, got {item:?}"));
                }
                parse_float(name, item)?;
            }
        }
        Kind::Choice(options) => {
            if !options.contains(&value) {
                return invalid(format!(
                    "{name} must be one of {}, got {value:?}",
                    options.join(", ")
                ));
            }
        }
    }
    Ok(())
}
