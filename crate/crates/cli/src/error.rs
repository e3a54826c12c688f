//! CLI-level error type: every library error plus file handling, mapped to
//! stable exit codes and a one-line JSON rendering for stderr.
//!
//! Exit codes by category:
//!   2 usage / configuration
//!   3 input parsing
//!   4 input or parameter validation
//!   5 numeric failure (degenerate density, ill-conditioned fit, ...)
//!   6 file I/O

use std::path::PathBuf;

use estimkit::grid::GridError;
use estimkit::npdensity::DensityError;
use estimkit::paramdensity::FitError;
use estimkit::series::SeriesError;
use estimkit::synthlab::SynthError;
use estimkit::volatility::VolError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: price must be strictly positive, got {value}")]
    NonPositivePrice {
        path: PathBuf,
        line: usize,
        value: f64,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Vol(#[from] VolError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::NonPositivePrice { .. } => 4,
            CliError::Series(_) | CliError::Grid(_) | CliError::Vol(_) => 4,
            CliError::Synth(e) => match e {
                SynthError::BadParams(_)
                | SynthError::BadCovariance { .. }
                | SynthError::BadBandwidth(_)
                | SynthError::GridMismatch => 4,
            },
            CliError::Density(e) => match e {
                DensityError::DegenerateDensity => 5,
                _ => 4,
            },
            CliError::Fit(e) => match e {
                FitError::IllConditioned { .. }
                | FitError::ZeroMarginal { .. }
                | FitError::DegenerateDensity => 5,
                _ => 4,
            },
            CliError::Io { .. } => 6,
        }
    }

    /// Stable machine-readable code: the error variant's name.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::NonPositivePrice { .. } => "NonPositivePrice",
            CliError::Series(e) => match e {
                SeriesError::EmptySample { .. } => "EmptySample",
                SeriesError::TooShort { .. } => "TooShort",
                SeriesError::LengthMismatch { .. } => "LengthMismatch",
                SeriesError::NonFinite { .. } => "NonFinite",
                SeriesError::NonPositivePrice { .. } => "NonPositivePrice",
                SeriesError::TimestampsNotIncreasing { .. } => "TimestampsNotIncreasing",
                SeriesError::BadInterval(_) => "BadInterval",
            },
            CliError::Grid(e) => match e {
                GridError::BadStep(_) => "BadGrid",
                GridError::BadRange(..) => "BadGrid",
            },
            CliError::Vol(e) => match e {
                VolError::TooShort { .. } => "TooShort",
                VolError::BadWindow { .. } => "BadWindow",
            },
            CliError::Synth(e) => match e {
                SynthError::BadParams(_) => "BadParams",
                SynthError::BadCovariance { .. } => "BadCovariance",
                SynthError::BadBandwidth(_) => "BadBandwidth",
                SynthError::GridMismatch => "GridMismatch",
            },
            CliError::Density(e) => match e {
                DensityError::DegenerateDensity => "DegenerateDensity",
                DensityError::LengthMismatch { .. } => "LengthMismatch",
                DensityError::NonFinite { .. } => "NonFinite",
            },
            CliError::Fit(e) => match e {
                FitError::BadOrder(_) => "BadOrder",
                FitError::Underdetermined { .. } => "Underdetermined",
                FitError::IllConditioned { .. } => "IllConditioned",
                FitError::LengthMismatch { .. } => "LengthMismatch",
                FitError::DegenerateDomain => "DegenerateDomain",
                FitError::ZeroMarginal { .. } => "ZeroMarginal",
                FitError::DegenerateDensity => "DegenerateDensity",
            },
            CliError::Config(_) => "Config",
            CliError::Io { .. } => "Io",
        }
    }

    fn location(&self) -> Option<String> {
        match self {
            CliError::Parse { path, line, .. } | CliError::NonPositivePrice { path, line, .. } => {
                Some(format!("{}:{line}", path.display()))
            }
            CliError::Io { path, .. } => Some(path.display().to_string()),
            _ => None,
        }
    }

    /// One-line structured error for stderr.
    pub fn to_json_line(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("code".into(), self.code().into());
        obj.insert("message".into(), self.to_string().into());
        if let Some(loc) = self.location() {
            obj.insert("location".into(), loc.into());
        }
        serde_json::Value::Object(obj).to_string()
    }
}
