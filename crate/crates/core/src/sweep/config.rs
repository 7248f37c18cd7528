use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleConfig, PhaseModel};
use crate::noise::{DeterministicPhaseParams, NoiseError, NoiseParams};
use crate::quantum::{SystemParams, TimeGrid, TrajectoryOptions};

use super::SweepError;

pub const DEFAULT_REALIZATIONS: usize = 100;
/// Lowest frequency accepted for noise sweeps; the stationary variance
/// diverges as ω₀ → 0.
pub const MIN_NOISE_OMEGA0: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseKind {
    #[default]
    HarmonicNoise,
    DeterministicAveraged,
    DeterministicFixed,
    Zero,
}

impl PhaseKind {
    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::HarmonicNoise => "harmonic-noise",
            PhaseKind::DeterministicAveraged => "deterministic-averaged",
            PhaseKind::DeterministicFixed => "deterministic-fixed",
            PhaseKind::Zero => "zero",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "V0")]
    v0: f64,
    #[serde(rename = "F0")]
    f0: f64,
    #[serde(default)]
    phase: PhaseKind,
    phi0: Option<f64>,
    noise: Option<RawNoise>,
    omega0: Option<f64>,
    sweep: Option<RawSweep>,
    #[serde(default)]
    ensemble: RawEnsemble,
    #[serde(default)]
    time: RawTime,
    output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    gamma: Option<f64>,
    var_phi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    start: f64,
    stop: f64,
    count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    realizations: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_final: Option<f64>,
    dt: Option<f64>,
    tail_fraction: Option<f64>,
    sample_every: Option<usize>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Phase model with its parameters, independent of ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSpec {
    HarmonicNoise { gamma: f64, var_phi: f64 },
    DeterministicAveraged { var_phi: f64 },
    DeterministicFixed { var_phi: f64, phi0: f64 },
    Zero,
}

impl PhaseSpec {
    pub fn kind(&self) -> PhaseKind {
        match self {
            PhaseSpec::HarmonicNoise { .. } => PhaseKind::HarmonicNoise,
            PhaseSpec::DeterministicAveraged { .. } => PhaseKind::DeterministicAveraged,
            PhaseSpec::DeterministicFixed { .. } => PhaseKind::DeterministicFixed,
            PhaseSpec::Zero => PhaseKind::Zero,
        }
    }

    /// Stationary phase variance entering the effective-gap estimate.
    pub fn var_phi(&self) -> f64 {
        match *self {
            PhaseSpec::HarmonicNoise { var_phi, .. }
            | PhaseSpec::DeterministicAveraged { var_phi }
            | PhaseSpec::DeterministicFixed { var_phi, .. } => var_phi,
            PhaseSpec::Zero => 0.0,
        }
    }

    pub fn model(&self, omega0: f64) -> Result<PhaseModel, NoiseError> {
        Ok(match *self {
            PhaseSpec::HarmonicNoise { gamma, var_phi } => {
                PhaseModel::HarmonicNoise(NoiseParams::new(gamma, omega0, var_phi)?)
            }
            PhaseSpec::DeterministicAveraged { var_phi } => PhaseModel::DeterministicAveraged(
                DeterministicPhaseParams::new(var_phi, omega0, 0.0)?,
            ),
            PhaseSpec::DeterministicFixed { var_phi, phi0 } => PhaseModel::DeterministicFixed(
                DeterministicPhaseParams::new(var_phi, omega0, phi0)?,
            ),
            PhaseSpec::Zero => PhaseModel::Zero,
        })
    }
}

/// Linear grid of `count` points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self, SweepError> {
        if count < 2 {
            return Err(SweepError::invalid(
                "sweep.count",
                format!("must be >= 2, got {count}"),
            ));
        }
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(SweepError::invalid(
                "sweep",
                format!("need finite start < stop, got start = {start}, stop = {stop}"),
            ));
        }
        Ok(Self { start, stop, count })
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            return self.stop;
        }
        self.start + (self.stop - self.start) * k as f64 / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

/// A validated run description with all defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub system: SystemParams,
    pub phase: PhaseSpec,
    pub sweep: Option<FrequencyGrid>,
    /// Single frequency for one-off runs.
    pub omega0: Option<f64>,
    pub ensemble: EnsembleConfig,
    pub time: TimeGrid,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// Frequencies to visit: the sweep grid, or the single `omega0`.
    pub fn frequencies(&self) -> Vec<f64> {
        match (&self.sweep, self.omega0) {
            (Some(g), _) => g.points(),
            (None, Some(w)) => vec![w],
            (None, None) => Vec::new(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<SweepSpec, SweepError> {
    parse_config_with(text, &Overrides::default())
}

/// Parses a JSON run description, applies `overrides`, and validates it.
pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<SweepSpec, SweepError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| SweepError::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    validate(raw, overrides)
}

fn positive(key: &str, value: f64) -> Result<f64, SweepError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(SweepError::invalid(
            key,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

fn validate(raw: RawConfig, overrides: &Overrides) -> Result<SweepSpec, SweepError> {
    let system = SystemParams::new(positive("V0", raw.v0)?, positive("F0", raw.f0)?)
        .map_err(|e| SweepError::invalid("V0", e.to_string()))?;

    let var_phi = raw
        .noise
        .as_ref()
        .map(|n| positive("noise.var_phi", n.var_phi))
        .transpose()?;
    let need_var = |kind: PhaseKind| {
        var_phi.ok_or_else(|| {
            SweepError::invalid(
                "noise.var_phi",
                format!("required for phase `{}`", kind.name()),
            )
        })
    };
    if raw.phi0.is_some() && raw.phase != PhaseKind::DeterministicFixed {
        return Err(SweepError::invalid(
            "phi0",
            "only used with phase `deterministic-fixed`".to_string(),
        ));
    }
    let phase = match raw.phase {
        PhaseKind::HarmonicNoise => {
            let gamma = raw.noise.as_ref().and_then(|n| n.gamma).ok_or_else(|| {
                SweepError::invalid("noise.gamma", "required for phase `harmonic-noise`".into())
            })?;
            if !(gamma.is_finite() && gamma >= 0.0) {
                return Err(SweepError::invalid(
                    "noise.gamma",
                    format!("must be finite and >= 0, got {gamma}"),
                ));
            }
            PhaseSpec::HarmonicNoise {
                gamma,
                var_phi: need_var(raw.phase)?,
            }
        }
        PhaseKind::DeterministicAveraged => PhaseSpec::DeterministicAveraged {
            var_phi: need_var(raw.phase)?,
        },
        PhaseKind::DeterministicFixed => {
            let phi0 = raw.phi0.unwrap_or(0.0);
            if !(0.0..std::f64::consts::TAU).contains(&phi0) {
                return Err(SweepError::invalid(
                    "phi0",
                    format!("must lie in [0, 2π), got {phi0}"),
                ));
            }
            PhaseSpec::DeterministicFixed {
                var_phi: need_var(raw.phase)?,
                phi0,
            }
        }
        PhaseKind::Zero => {
            if raw.noise.is_some() {
                return Err(SweepError::invalid(
                    "noise",
                    "not used with phase `zero`".into(),
                ));
            }
            PhaseSpec::Zero
        }
    };

    let sweep = raw
        .sweep
        .map(|s| FrequencyGrid::new(s.start, s.stop, s.count))
        .transpose()?;
    let omega0 = raw.omega0.map(|w| positive("omega0", w)).transpose()?;
    if sweep.is_some() == omega0.is_some() {
        return Err(SweepError::invalid(
            "sweep",
            "give exactly one of `sweep` and `omega0`".into(),
        ));
    }
    let min_omega = |key: &str, w: f64| {
        if phase.kind() == PhaseKind::HarmonicNoise && w < MIN_NOISE_OMEGA0 {
            Err(SweepError::invalid(
                key,
                format!("noise frequencies must be >= {MIN_NOISE_OMEGA0}, got {w}"),
            ))
        } else if w <= 0.0 && phase.kind() != PhaseKind::Zero {
            Err(SweepError::invalid(key, format!("must be > 0, got {w}")))
        } else {
            Ok(())
        }
    };
    if let Some(g) = &sweep {
        min_omega("sweep.start", g.start)?;
    }
    if let Some(w) = omega0 {
        min_omega("omega0", w)?;
    }
    // check every frequency builds a valid phase model
    if let Some(w) = sweep.map(|g| g.start).or(omega0) {
        phase
            .model(w)
            .map_err(|e| SweepError::invalid("noise", e.to_string()))?;
    }

    let t_final = overrides
        .t_final
        .or(raw.time.t_final)
        .unwrap_or(TimeGrid::DEFAULT_T_FINAL);
    let dt = overrides.dt.or(raw.time.dt).unwrap_or(TimeGrid::DEFAULT_DT);
    let time =
        TimeGrid::new(t_final, dt).map_err(|e| SweepError::invalid("time", e.to_string()))?;
    let mut options = TrajectoryOptions::default();
    if let Some(f) = raw.time.tail_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(SweepError::invalid(
                "time.tail_fraction",
                format!("must lie in (0, 1], got {f}"),
            ));
        }
        options.tail_fraction = f;
    }
    if let Some(every) = raw.time.sample_every {
        if every == 0 {
            return Err(SweepError::invalid(
                "time.sample_every",
                "must be >= 1".into(),
            ));
        }
        options.sample_every = every;
    }

    let n = overrides
        .realizations
        .or(raw.ensemble.realizations)
        .unwrap_or(DEFAULT_REALIZATIONS);
    if n == 0 {
        return Err(SweepError::invalid(
            "ensemble.realizations",
            "must be >= 1".into(),
        ));
    }
    let ensemble = EnsembleConfig {
        n_realizations: n,
        master_seed: overrides.seed.or(raw.ensemble.seed).unwrap_or(0),
        threads: overrides.threads.or(raw.ensemble.threads).unwrap_or(0),
        options,
    };

    Ok(SweepSpec {
        system,
        phase,
        sweep,
        omega0,
        ensemble,
        time,
        output: overrides.output.clone().or(raw.output),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"V0": 0.75, "F0": 0.5,
        "noise": {"gamma": 0.05, "var_phi": 0.5},
        "sweep": {"start": 0.05, "stop": 6, "count": 120}}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.time, TimeGrid::new(100.0, 1e-3).unwrap());
        assert_eq!(spec.ensemble.n_realizations, 100);
        assert_eq!(spec.ensemble.options.tail_fraction, 0.1);
        assert_eq!(spec.ensemble.options.sample_every, 100);
        assert_eq!(
            spec.phase,
            PhaseSpec::HarmonicNoise {
                gamma: 0.05,
                var_phi: 0.5
            }
        );
        let w = spec.frequencies();
        assert_eq!(w.len(), 120);
        assert_eq!(w[0], 0.05);
        assert_eq!(w[119], 6.0);
        assert!(spec.output.is_none());
    }

    #[test]
    fn frequency_source_is_exclusive() {
        let both = MINIMAL.replace("\"sweep\"", "\"omega0\": 1, \"sweep\"");
        let neither = r#"{"V0": 0.75, "F0": 0.5, "noise": {"gamma": 0.05, "var_phi": 0.5}}"#;
        for text in [both.as_str(), neither] {
            let err = parse_config(text).unwrap_err();
            assert!(err.to_string().contains("`sweep`"), "{err}");
        }
    }

    #[test]
    fn non_positive_variance_names_the_key() {
        let text = MINIMAL.replace("\"var_phi\": 0.5", "\"var_phi\": 0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("noise.var_phi"), "{err}");
        assert!(matches!(err, SweepError::Invalid { .. }));
    }

    #[test]
    fn unknown_key_is_listed() {
        let text = MINIMAL.replace("\"var_phi\"", "\"vraiance\"");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("vraiance"), "{msg}");
        assert!(msg.contains("noise"), "{msg}");
    }

    #[test]
    fn overrides_take_precedence() {
        let o = Overrides {
            seed: Some(9),
            realizations: Some(7),
            t_final: Some(10.0),
            dt: Some(0.01),
            threads: Some(2),
            output: Some("x.csv".into()),
        };
        let spec = parse_config_with(MINIMAL, &o).unwrap();
        assert_eq!(spec.ensemble.master_seed, 9);
        assert_eq!(spec.ensemble.n_realizations, 7);
        assert_eq!(spec.ensemble.threads, 2);
        assert_eq!(spec.time.steps(), 2000);
        assert_eq!(spec.output, Some(PathBuf::from("x.csv")));
    }

    #[test]
    fn invalid_grids_rejected() {
        for (from, to) in [
            ("\"count\": 120", "\"count\": 1"),
            ("\"stop\": 6", "\"stop\": 0.01"),
            ("\"start\": 0.05", "\"start\": 0.001"),
        ] {
            assert!(parse_config(&MINIMAL.replace(from, to)).is_err(), "{to}");
        }
        let bad_dt = MINIMAL.replace("}}", "}, \"time\": {\"dt\": 0.3}}");
        let err = parse_config(&bad_dt).unwrap_err();
        assert!(err.to_string().contains("time"), "{err}");
    }

    #[test]
    fn phase_modes() {
        let zero = r#"{"V0": 0.75, "F0": 0.5, "phase": "zero", "omega0": 1}"#;
        assert_eq!(parse_config(zero).unwrap().phase, PhaseSpec::Zero);
        let fixed = r#"{"V0": 0.75, "F0": 0.5, "phase": "deterministic-fixed", "phi0": 1.0,
            "noise": {"var_phi": 0.5}, "omega0": 3.12}"#;
        assert_eq!(
            parse_config(fixed).unwrap().phase,
            PhaseSpec::DeterministicFixed {
                var_phi: 0.5,
                phi0: 1.0
            }
        );
        let no_gamma = r#"{"V0": 0.75, "F0": 0.5, "noise": {"var_phi": 0.5}, "omega0": 1}"#;
        assert!(parse_config(no_gamma)
            .unwrap_err()
            .to_string()
            .contains("noise.gamma"));
        let stray_phi0 = MINIMAL.replace("\"F0\": 0.5", "\"F0\": 0.5, \"phi0\": 1");
        assert!(parse_config(&stray_phi0).is_err());
        let bad_phase = MINIMAL.replace("\"F0\": 0.5", "\"F0\": 0.5, \"phase\": \"white\"");
        assert!(matches!(
            parse_config(&bad_phase),
            Err(SweepError::Config { .. })
        ));
    }
}
