use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::NoiseError;

/// Parameters of the harmonic noise process
///
/// ```text
/// dφ = ν dt
/// dν = (-2Γν - ω₀²φ) dt + sqrt(4ΓT) dW
/// ```
///
/// The phase variance is the stored quantity; the temperature `T = Var(φ)·ω₀²`
/// is derived from it so that sweeps over `ω₀` at fixed variance stay
/// consistent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    gamma: f64,
    omega0: f64,
    var_phi: f64,
    temperature: f64,
}

impl NoiseParams {
    pub fn new(gamma: f64, omega0: f64, var_phi: f64) -> Result<Self, NoiseError> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(NoiseError::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite and >= 0",
            });
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(NoiseError::InvalidParameter {
                name: "omega0",
                value: omega0,
                reason: "must be finite and > 0",
            });
        }
        if !(var_phi.is_finite() && var_phi > 0.0) {
            return Err(NoiseError::InvalidParameter {
                name: "var_phi",
                value: var_phi,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self {
            gamma,
            omega0,
            var_phi,
            temperature: var_phi * omega0 * omega0,
        })
    }

    /// Builds parameters from a temperature instead of a phase variance.
    pub fn from_temperature(gamma: f64, omega0: f64, temperature: f64) -> Result<Self, NoiseError> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(NoiseError::InvalidParameter {
                name: "omega0",
                value: omega0,
                reason: "must be finite and > 0",
            });
        }
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(NoiseError::InvalidParameter {
                name: "temperature",
                value: temperature,
                reason: "must be finite and > 0",
            });
        }
        Self::new(gamma, omega0, temperature / (omega0 * omega0))
    }

    /// Same damping and variance at a different characteristic frequency.
    pub fn with_omega0(&self, omega0: f64) -> Result<Self, NoiseError> {
        Self::new(self.gamma, omega0, self.var_phi)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn var_phi(&self) -> f64 {
        self.var_phi
    }

    /// `T = Var(φ)·ω₀²`, which is also the stationary variance of ν.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Intensity `4ΓT` of the white-noise force acting on ν.
    pub fn diffusion(&self) -> f64 {
        4.0 * self.gamma * self.temperature
    }

    pub fn is_underdamped(&self) -> bool {
        self.omega0 * self.omega0 > 2.0 * self.gamma * self.gamma
    }
}

/// Instantaneous value of the noise: phase and phase velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseState {
    pub phi: f64,
    pub nu: f64,
}

impl NoiseState {
    pub const fn new(phi: f64, nu: f64) -> Self {
        Self { phi, nu }
    }

    /// Oscillator energy `ω₀²φ² + ν²` (up to a factor 1/2).
    pub fn energy(&self, omega0: f64) -> f64 {
        omega0 * omega0 * self.phi * self.phi + self.nu * self.nu
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.nu.is_finite()
    }
}

/// Noise trajectory sampled on a uniform grid `t0 + k·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    t0: f64,
    h: f64,
    values: Vec<NoiseState>,
}

impl NoisePath {
    pub fn new(t0: f64, h: f64, values: Vec<NoiseState>) -> Result<Self, NoiseError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(NoiseError::InvalidStep(h));
        }
        if values.len() < 2 {
            return Err(NoiseError::PathTooShort(values.len()));
        }
        Ok(Self { t0, h, values })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn time(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.h
    }

    pub fn values(&self) -> &[NoiseState] {
        &self.values
    }

    pub fn phi(&self, index: usize) -> f64 {
        self.values[index].phi
    }

    pub fn phases(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.values.iter().map(|s| s.phi)
    }

    /// True when both paths live on the same grid (start, step and length).
    pub fn same_grid(&self, other: &NoisePath) -> bool {
        self.values.len() == other.values.len()
            && close(self.t0, other.t0, self.h)
            && close(self.h, other.h, self.h)
    }
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.abs().max(a.abs()).max(b.abs()).max(1.0)
}

/// Sinusoidal stand-in for the noise, `2·sqrt(Var(φ))·sin(ω₀t + φ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterministicPhaseParams {
    amplitude: f64,
    omega0: f64,
    phi0: f64,
}

impl DeterministicPhaseParams {
    pub fn new(var_phi: f64, omega0: f64, phi0: f64) -> Result<Self, NoiseError> {
        if !(var_phi.is_finite() && var_phi > 0.0) {
            return Err(NoiseError::InvalidParameter {
                name: "var_phi",
                value: var_phi,
                reason: "must be finite and > 0",
            });
        }
        if !omega0.is_finite() {
            return Err(NoiseError::InvalidParameter {
                name: "omega0",
                value: omega0,
                reason: "must be finite",
            });
        }
        if !(0.0..TAU).contains(&phi0) {
            return Err(NoiseError::InvalidParameter {
                name: "phi0",
                value: phi0,
                reason: "must lie in [0, 2π)",
            });
        }
        Ok(Self {
            amplitude: 2.0 * var_phi.sqrt(),
            omega0,
            phi0,
        })
    }

    /// Power-matched counterpart of a harmonic noise process.
    pub fn matching(params: &NoiseParams, phi0: f64) -> Result<Self, NoiseError> {
        Self::new(params.var_phi(), params.omega0(), phi0)
    }

    pub fn with_phi0(&self, phi0: f64) -> Result<Self, NoiseError> {
        let var_phi = 0.25 * self.amplitude * self.amplitude;
        Self::new(var_phi, self.omega0, phi0)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }
}

pub fn deterministic_phase(params: &DeterministicPhaseParams, t: f64) -> f64 {
    params.amplitude * (params.omega0 * t + params.phi0).sin()
}
