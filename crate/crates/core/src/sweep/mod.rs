//! Frequency sweeps, figure presets, noise validation and CSV output.

mod config;
mod csv;
mod presets;
mod run;
mod validate;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::ensemble::EnsembleError;
use crate::noise::NoiseError;

pub use config::{
    parse_config, parse_config_with, FrequencyGrid, Overrides, PhaseKind, PhaseSpec, SweepSpec,
    DEFAULT_REALIZATIONS, MIN_NOISE_OMEGA0,
};
pub use csv::{
    emit_csv, format_float, read_csv, read_csv_file, write_csv, CsvSink, CSV_HEADER,
    MIN_SIGNIFICANT_DIGITS,
};
pub use presets::{preset_curves, Preset, PresetCurve, PRESET_F0, PRESET_GRID, PRESET_V0};
pub use run::{
    point_seed, run_sweep, saturation_value, SweepRow, DEFAULT_SATURATION_WINDOW,
    MIN_SATURATION_ROWS,
};
pub use validate::{
    emit_noise_csv, parse_noise_validation, validate_noise, write_noise_csv, NoiseSummary,
    NoiseValidation, NoiseValidationSpec, NOISE_CSV_HEADER,
};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("at omega0 = {omega0}: {source}")]
    Ensemble {
        omega0: f64,
        #[source]
        source: EnsembleError,
    },
    #[error("noise generation failed: {0}")]
    Noise(NoiseError),
    #[error(
        "saturation window [{lo}, {hi}] holds {found} rows, need at least {MIN_SATURATION_ROWS}"
    )]
    SaturationWindow { lo: f64, hi: f64, found: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl SweepError {
    pub fn invalid(key: &str, message: String) -> Self {
        SweepError::Invalid {
            key: key.to_string(),
            message,
        }
    }
}
