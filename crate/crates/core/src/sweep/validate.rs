use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::derive_seed;
use crate::noise::{
    analytic_spectrum, empirical_spectrum, generate_path, spectrum_peak, EmpiricalSpectrum,
    NoiseParams, NoisePath,
};

use super::config::Overrides;
use super::csv::format_float;
use super::SweepError;

pub const NOISE_CSV_HEADER: &str = "omega,S_empirical,S_analytic";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidation {
    noise: RawValidationNoise,
    paths: Option<usize>,
    duration: Option<f64>,
    step: Option<f64>,
    seed: Option<u64>,
    threads: Option<usize>,
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidationNoise {
    gamma: f64,
    omega0: f64,
    var_phi: Option<f64>,
    temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseValidationSpec {
    pub params: NoiseParams,
    pub paths: usize,
    pub duration: f64,
    pub step: f64,
    pub seed: u64,
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl NoiseValidationSpec {
    pub const DEFAULT_PATHS: usize = 200;
    pub const DEFAULT_DURATION: f64 = 400.0;
    pub const DEFAULT_STEP: f64 = 0.05;
}

/// Parses a noise-validation config. `--realizations` sets the path count.
pub fn parse_noise_validation(
    text: &str,
    overrides: &Overrides,
) -> Result<NoiseValidationSpec, SweepError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawValidation =
        serde_path_to_error::deserialize(de).map_err(|e| SweepError::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    let n = &raw.noise;
    let params = match (n.var_phi, n.temperature) {
        (Some(v), None) => NoiseParams::new(n.gamma, n.omega0, v),
        (None, Some(t)) => NoiseParams::from_temperature(n.gamma, n.omega0, t),
        _ => {
            return Err(SweepError::invalid(
                "noise",
                "give exactly one of `var_phi` and `temperature`".into(),
            ))
        }
    }
    .map_err(|e| SweepError::invalid("noise", e.to_string()))?;
    if params.gamma() == 0.0 {
        return Err(SweepError::invalid(
            "noise.gamma",
            "must be > 0: an undamped oscillator has no stationary spectrum".into(),
        ));
    }
    let paths = overrides
        .realizations
        .or(raw.paths)
        .unwrap_or(NoiseValidationSpec::DEFAULT_PATHS);
    if paths == 0 {
        return Err(SweepError::invalid("paths", "must be >= 1".into()));
    }
    let duration = raw
        .duration
        .unwrap_or(NoiseValidationSpec::DEFAULT_DURATION);
    let step = raw.step.unwrap_or(NoiseValidationSpec::DEFAULT_STEP);
    for (key, v) in [("duration", duration), ("step", step)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(SweepError::invalid(
                key,
                format!("must be finite and > 0, got {v}"),
            ));
        }
    }
    if duration < 2.0 * step {
        return Err(SweepError::invalid(
            "duration",
            "must cover at least two steps".into(),
        ));
    }
    Ok(NoiseValidationSpec {
        params,
        paths,
        duration,
        step,
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        threads: overrides.threads.or(raw.threads).unwrap_or(0),
        output: overrides.output.clone().or(raw.output),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSummary {
    /// Mean over paths of the time-averaged `φ²`.
    pub variance: f64,
    /// Standard error of `variance` from its spread across paths.
    pub variance_se: f64,
    pub expected_variance: f64,
    /// `(variance - expected) / variance_se`.
    pub variance_z: f64,
    pub total_power: f64,
    pub peak_empirical: f64,
    pub peak_analytic: f64,
    pub bin_width: f64,
    pub paths: usize,
}

impl NoiseSummary {
    pub fn variance_ok(&self) -> bool {
        self.variance_z.abs() <= 3.0
    }

    pub fn peak_ok(&self) -> bool {
        (self.peak_empirical - self.peak_analytic).abs() <= self.bin_width
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!(
                "variance {} +- {} (expected {}, z = {:.3}, {})",
                self.variance,
                self.variance_se,
                self.expected_variance,
                self.variance_z,
                if self.variance_ok() { "ok" } else { "off" }
            ),
            format!("integrated spectrum {}", self.total_power),
            format!(
                "peak {} (analytic {}, bin width {}, {})",
                self.peak_empirical,
                self.peak_analytic,
                self.bin_width,
                if self.peak_ok() { "ok" } else { "off" }
            ),
            format!("paths {}", self.paths),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseValidation {
    pub spectrum: EmpiricalSpectrum,
    pub analytic: Vec<f64>,
    pub summary: NoiseSummary,
}

fn generate(spec: &NoiseValidationSpec) -> Result<Vec<NoisePath>, SweepError> {
    let work = || {
        (0..spec.paths as u64)
            .into_par_iter()
            .map(|i| {
                generate_path(
                    &spec.params,
                    0.0,
                    spec.duration,
                    spec.step,
                    derive_seed(spec.seed, i),
                )
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let paths = if spec.threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.threads)
            .build()
            .map_err(|e| SweepError::Runtime(e.to_string()))?
            .install(work)
    };
    paths.map_err(SweepError::Noise)
}

/// Generates the paths, estimates their spectrum and variance, and compares
/// both against the stationary predictions.
pub fn validate_noise(spec: &NoiseValidationSpec) -> Result<NoiseValidation, SweepError> {
    let paths = generate(spec)?;
    let spectrum = empirical_spectrum(&paths, None).map_err(SweepError::Noise)?;
    let analytic = spectrum
        .omega
        .iter()
        .map(|&w| analytic_spectrum(&spec.params, w))
        .collect::<Result<Vec<_>, _>>()
        .map_err(SweepError::Noise)?;

    let per_path: Vec<f64> = paths
        .iter()
        .map(|p| p.phases().map(|x| x * x).sum::<f64>() / p.len() as f64)
        .collect();
    let n = per_path.len() as f64;
    let variance = per_path.iter().sum::<f64>() / n;
    let variance_se = if per_path.len() > 1 {
        (per_path.iter().map(|v| (v - variance).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        f64::INFINITY
    };
    let expected_variance = spec.params.var_phi();
    let summary = NoiseSummary {
        variance,
        variance_se,
        expected_variance,
        variance_z: (variance - expected_variance) / variance_se,
        total_power: spectrum.total_power(),
        peak_empirical: spectrum.peak_omega(),
        peak_analytic: spectrum_peak(&spec.params),
        bin_width: spectrum.bin_width(),
        paths: paths.len(),
    };
    Ok(NoiseValidation {
        spectrum,
        analytic,
        summary,
    })
}

pub fn write_noise_csv<W: Write>(mut out: W, v: &NoiseValidation) -> io::Result<()> {
    for line in v.summary.lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{NOISE_CSV_HEADER}")?;
    for ((w, s), a) in v
        .spectrum
        .omega
        .iter()
        .zip(&v.spectrum.density)
        .zip(&v.analytic)
    {
        writeln!(
            out,
            "{},{},{}",
            format_float(*w),
            format_float(*s),
            format_float(*a)
        )?;
    }
    out.flush()
}

pub fn emit_noise_csv(v: &NoiseValidation, path: &Path) -> Result<(), SweepError> {
    let io_err = |source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_noise_csv(BufWriter::new(file), v).map_err(io_err)
}
