//! Harmonic noise: a white-noise-driven damped oscillator used as the phase
//! of the Landau-Zener coupling, together with its sinusoidal stand-in.

mod heun;
mod kernel;
mod params;
mod path;
mod spectrum;

use thiserror::Error;

pub use heun::{heun_step, heun_step_with_increment, heun_transition_moments};
pub use kernel::{exact_step, sample_equilibrium, ExactKernel, Regime, NEAR_CRITICAL_THRESHOLD};
pub use params::{
    deterministic_phase, DeterministicPhaseParams, NoiseParams, NoisePath, NoiseState,
};
pub use path::{generate_path, grid_intervals, path_rng, MAX_PATH_POINTS};
pub use spectrum::{analytic_spectrum, empirical_spectrum, spectrum_peak, EmpiricalSpectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("invalid noise parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("step size must be finite and positive, got {0}")]
    InvalidStep(f64),
    #[error("time interval [{start}, {end}] is empty or inverted")]
    InvalidInterval { start: f64, end: f64 },
    #[error("interval length {length} is not a whole number of steps of {step}")]
    IncommensurateGrid { length: f64, step: f64 },
    #[error("path of {0} points exceeds the memory budget")]
    PathTooLong(usize),
    #[error("a noise path needs at least two points, got {0}")]
    PathTooShort(usize),
    #[error("the power spectrum is not a function for zero damping")]
    ZeroDamping,
    #[error("no paths supplied")]
    EmptyEnsemble,
    #[error("path {index} does not share the grid of path 0")]
    GridMismatch { index: usize },
    #[error("segment length {segment_len} is invalid for paths of {path_len} points")]
    InvalidSegment { segment_len: usize, path_len: usize },
}
