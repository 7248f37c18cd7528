//! Two-level Landau-Zener dynamics with a phase on the coupling.

mod hamiltonian;
mod propagator;
mod trajectory;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hamiltonian::{hamiltonian, instantaneous_gap, Hermitian2};
pub use propagator::propagate_step;
pub use trajectory::{
    run_trajectory, run_trajectory_with, tail_average, PhaseSource, ProbabilitySample,
    TrajectoryOptions, TrajectoryResult, DEFAULT_SAMPLE_EVERY, DEFAULT_TAIL_FRACTION,
};

/// Tolerance on `|c0|² + |c1|² - 1` for a valid state.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("invalid system parameter `{name}` = {value}: must be finite and > 0")]
    InvalidSystem { name: &'static str, value: f64 },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("state is not normalized: |c0|² + |c1|² = {0}")]
    NotNormalized(f64),
    #[error("noise path does not match the propagation grid: {0}")]
    PhaseGridMismatch(String),
    #[error("cannot average an empty series")]
    EmptySeries,
    #[error("tail fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
}

/// Coupling `V₀` and sweep rate `F₀` of the Landau-Zener model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    v0: f64,
    f0: f64,
}

impl SystemParams {
    pub fn new(v0: f64, f0: f64) -> Result<Self, QuantumError> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(QuantumError::InvalidSystem {
                name: "V0",
                value: v0,
            });
        }
        if !(f0.is_finite() && f0 > 0.0) {
            return Err(QuantumError::InvalidSystem {
                name: "F0",
                value: f0,
            });
        }
        Ok(Self { v0, f0 })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }
}

/// Amplitudes in the diabatic basis `{(1,0)ᵀ, (0,1)ᵀ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    c0: Complex64,
    c1: Complex64,
}

impl TwoLevelState {
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self, QuantumError> {
        let n = c0.norm_sqr() + c1.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE || !n.is_finite() {
            return Err(QuantumError::NotNormalized(n));
        }
        Ok(Self { c0, c1 })
    }

    pub(crate) fn from_amplitudes_unchecked(c0: Complex64, c1: Complex64) -> Self {
        Self { c0, c1 }
    }

    /// Diabatic state `(1, 0)ᵀ`.
    pub fn basis0() -> Self {
        Self {
            c0: Complex64::new(1.0, 0.0),
            c1: Complex64::new(0.0, 0.0),
        }
    }

    /// Diabatic state `(0, 1)ᵀ`, the lower one at negative times for `F₀ > 0`.
    pub fn basis1() -> Self {
        Self {
            c0: Complex64::new(0.0, 0.0),
            c1: Complex64::new(1.0, 0.0),
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.c0, self.c1]
    }

    pub fn population0(&self) -> f64 {
        self.c0.norm_sqr()
    }

    pub fn population1(&self) -> f64 {
        self.c1.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    /// `|⟨v|ψ⟩|²` for a normalized vector `v`.
    pub fn overlap_sqr(&self, v: &[Complex64; 2]) -> f64 {
        (v[0].conj() * self.c0 + v[1].conj() * self.c1).norm_sqr()
    }
}

/// Symmetric window `[-t_f, t_f]` split into steps of `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_final: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub const DEFAULT_T_FINAL: f64 = 100.0;
    pub const DEFAULT_DT: f64 = 1e-3;

    pub fn new(t_final: f64, dt: f64) -> Result<Self, QuantumError> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(QuantumError::InvalidGrid(format!(
                "t_final must be finite and > 0, got {t_final}"
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(QuantumError::InvalidGrid(format!(
                "dt must be finite and > 0, got {dt}"
            )));
        }
        let ratio = t_final / dt;
        let half = ratio.round();
        if half < 1.0 || (ratio - half).abs() > 1e-9 * ratio {
            return Err(QuantumError::InvalidGrid(format!(
                "t_final = {t_final} is not a whole number of steps dt = {dt}"
            )));
        }
        Ok(Self {
            t_final,
            dt,
            steps: 2 * half as usize,
        })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of propagation steps across `[-t_f, t_f]`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_start(&self) -> f64 {
        -self.t_final
    }

    /// Time after `k` steps.
    pub fn time(&self, k: usize) -> f64 {
        -self.t_final + k as f64 * self.dt
    }

    /// Step of the noise grid that provides midpoint phases.
    pub fn noise_step(&self) -> f64 {
        0.5 * self.dt
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_T_FINAL, Self::DEFAULT_DT).expect("default grid is valid")
    }
}
