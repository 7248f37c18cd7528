use std::fmt;
use std::str::FromStr;

use crate::ensemble::EnsembleConfig;
use crate::quantum::{SystemParams, TimeGrid, TrajectoryOptions};

use super::config::{FrequencyGrid, Overrides, PhaseSpec, SweepSpec, DEFAULT_REALIZATIONS};
use super::SweepError;

pub const PRESET_V0: f64 = 0.75;
pub const PRESET_F0: f64 = 0.5;
pub const PRESET_GRID: (f64, f64, usize) = (0.05, 6.0, 120);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Γ = 0.05 at Var(φ) ∈ {0.1, 0.5, 2}.
    Fig1Top,
    /// Var(φ) = 0.5 at Γ ∈ {0, 0.05, 2.5}.
    Fig1Bottom,
    /// Harmonic noise against both sinusoidal models at Var(φ) = 0.5.
    Fig3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig1Top, Preset::Fig1Bottom, Preset::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1Top => "fig1-top",
            Preset::Fig1Bottom => "fig1-bottom",
            Preset::Fig3 => "fig3",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                SweepError::invalid(
                    "preset",
                    format!("unknown preset `{s}`, expected fig1-top, fig1-bottom or fig3"),
                )
            })
    }
}

/// One curve of a preset: its run description and the metadata written
/// above the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetCurve {
    pub label: String,
    pub spec: SweepSpec,
    pub metadata: Vec<String>,
}

impl PresetCurve {
    pub fn file_name(&self, preset: Preset) -> String {
        format!("{}_{}.csv", preset.name(), self.label)
    }
}

fn describe(phase: &PhaseSpec) -> String {
    match *phase {
        PhaseSpec::HarmonicNoise { gamma, var_phi } => {
            format!("phase harmonic-noise, gamma {gamma}, var_phi {var_phi}")
        }
        PhaseSpec::DeterministicAveraged { var_phi } => {
            format!("phase deterministic-averaged (phi0 uniform in [0, 2pi)), var_phi {var_phi}")
        }
        PhaseSpec::DeterministicFixed { var_phi, phi0 } => {
            format!("phase deterministic-fixed, phi0 {phi0}, var_phi {var_phi}")
        }
        PhaseSpec::Zero => "phase zero".to_string(),
    }
}

pub fn preset_curves(
    preset: Preset,
    overrides: &Overrides,
) -> Result<Vec<PresetCurve>, SweepError> {
    let curves: Vec<(String, PhaseSpec)> = match preset {
        Preset::Fig1Top => [0.1, 0.5, 2.0]
            .into_iter()
            .map(|var_phi| {
                (
                    format!("var{var_phi}"),
                    PhaseSpec::HarmonicNoise {
                        gamma: 0.05,
                        var_phi,
                    },
                )
            })
            .collect(),
        Preset::Fig1Bottom => [0.0, 0.05, 2.5]
            .into_iter()
            .map(|gamma| {
                (
                    format!("gamma{gamma}"),
                    PhaseSpec::HarmonicNoise {
                        gamma,
                        var_phi: 0.5,
                    },
                )
            })
            .collect(),
        Preset::Fig3 => vec![
            (
                "noise".into(),
                PhaseSpec::HarmonicNoise {
                    gamma: 0.05,
                    var_phi: 0.5,
                },
            ),
            (
                "deterministic-averaged".into(),
                PhaseSpec::DeterministicAveraged { var_phi: 0.5 },
            ),
            (
                "deterministic-fixed".into(),
                PhaseSpec::DeterministicFixed {
                    var_phi: 0.5,
                    phi0: 0.0,
                },
            ),
        ],
    };

    let system = SystemParams::new(PRESET_V0, PRESET_F0).expect("preset system is valid");
    let time = TimeGrid::new(
        overrides.t_final.unwrap_or(TimeGrid::DEFAULT_T_FINAL),
        overrides.dt.unwrap_or(TimeGrid::DEFAULT_DT),
    )
    .map_err(|e| SweepError::invalid("time", e.to_string()))?;
    let n = overrides.realizations.unwrap_or(DEFAULT_REALIZATIONS);
    if n == 0 {
        return Err(SweepError::invalid("realizations", "must be >= 1".into()));
    }
    let ensemble = EnsembleConfig {
        n_realizations: n,
        master_seed: overrides.seed.unwrap_or(0),
        threads: overrides.threads.unwrap_or(0),
        options: TrajectoryOptions::default(),
    };
    let (start, stop, count) = PRESET_GRID;
    let grid = FrequencyGrid::new(start, stop, count)?;

    Ok(curves
        .into_iter()
        .map(|(label, phase)| {
            let metadata = vec![
                format!("preset: {preset}, curve: {label}"),
                format!("V0 {PRESET_V0}, F0 {PRESET_F0}, {}", describe(&phase)),
                format!("omega0 grid: {count} linear points over [{start}, {stop}]"),
                format!(
                    "realizations per point: {}, master seed: {}",
                    ensemble.n_realizations, ensemble.master_seed
                ),
                format!(
                    "t_final {}, dt {}, tail fraction {}",
                    time.t_final(),
                    time.dt(),
                    ensemble.options.tail_fraction
                ),
            ];
            PresetCurve {
                label,
                spec: SweepSpec {
                    system,
                    phase,
                    sweep: Some(grid),
                    omega0: None,
                    ensemble,
                    time,
                    output: None,
                },
                metadata,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig2".parse::<Preset>().is_err());
    }

    #[test]
    fn curves_follow_the_figure_parameters() {
        let top = preset_curves(Preset::Fig1Top, &Overrides::default()).unwrap();
        let vars: Vec<f64> = top.iter().map(|c| c.spec.phase.var_phi()).collect();
        assert_eq!(vars, [0.1, 0.5, 2.0]);
        let bottom = preset_curves(Preset::Fig1Bottom, &Overrides::default()).unwrap();
        let gammas: Vec<f64> = bottom
            .iter()
            .map(|c| match c.spec.phase {
                PhaseSpec::HarmonicNoise { gamma, .. } => gamma,
                _ => panic!("noise curves only"),
            })
            .collect();
        assert_eq!(gammas, [0.0, 0.05, 2.5]);
        let fig3 = preset_curves(Preset::Fig3, &Overrides::default()).unwrap();
        assert_eq!(
            fig3[2].file_name(Preset::Fig3),
            "fig3_deterministic-fixed.csv"
        );
        for c in top.iter().chain(&bottom).chain(&fig3) {
            assert_eq!(c.spec.ensemble.n_realizations, 100);
            assert_eq!(c.spec.frequencies().len(), 120);
            assert_eq!(c.spec.time, TimeGrid::default());
            assert!(c.metadata.iter().any(|m| m.contains("120 linear points")));
        }
    }
}
