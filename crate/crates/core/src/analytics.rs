//! Closed-form Landau-Zener probability and its effective-gap estimate for
//! the phase-averaged coupling.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{gauss_hermite, QuadratureRule};

/// Order of the Gauss-Hermite rule used for narrow phase distributions.
pub const HERMITE_ORDER: usize = 128;

/// Largest variance handled by Gauss-Hermite quadrature. Beyond it the kinks
/// of `|cos(φ/2)|` at `φ = ±π` fall inside the bulk of the Gaussian and the
/// rule loses accuracy, so the cosine series of `|cos|` is summed instead
/// (the two agree to ~1e-14 here).
pub const HERMITE_MAX_VARIANCE: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("sweep rate F0 must be finite and > 0, got {0}")]
    InvalidSweepRate(f64),
    #[error("coupling V0 must be finite and >= 0, got {0}")]
    InvalidCoupling(f64),
    #[error("phase variance must be finite and >= 0, got {0}")]
    InvalidVariance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub delta_e_eff: f64,
    pub p_est: f64,
}

fn hermite_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(HERMITE_ORDER))
}

fn check_inputs(v0: f64, f0: Option<f64>) -> Result<(), AnalyticsError> {
    if !(v0.is_finite() && v0 >= 0.0) {
        return Err(AnalyticsError::InvalidCoupling(v0));
    }
    if let Some(f0) = f0 {
        if !(f0.is_finite() && f0 > 0.0) {
            return Err(AnalyticsError::InvalidSweepRate(f0));
        }
    }
    Ok(())
}

/// `1 - exp(-π·gap²/(2F₀))`, the diabatic transition probability of a linear
/// crossing whose minimal splitting is `gap`.
pub fn lz_probability(gap: f64, f0: f64) -> Result<f64, AnalyticsError> {
    check_inputs(gap, Some(f0))?;
    Ok(-(-PI * gap * gap / (2.0 * f0)).exp_m1())
}

/// `E[2|cos(φ/2)|]` for `φ ~ N(0, var_phi)`, i.e. the phase average of
/// `sqrt(2(cos φ + 1))`.
pub fn mean_coupling_factor(var_phi: f64) -> Result<f64, AnalyticsError> {
    if !(var_phi.is_finite() && var_phi >= 0.0) {
        return Err(AnalyticsError::InvalidVariance(var_phi));
    }
    if var_phi == 0.0 {
        return Ok(2.0);
    }
    if var_phi <= HERMITE_MAX_VARIANCE {
        // φ = sqrt(2·var)·x against the weight e^{-x²}
        let scale = (2.0 * var_phi).sqrt();
        let sum = hermite_rule().integrate(|x| 2.0 * (0.5 * scale * x).cos().abs());
        return Ok(sum / PI.sqrt());
    }
    // |cos θ| = 2/π + (4/π) Σ (-1)^{k+1} cos(2kθ)/(4k²-1) and E[cos kφ] = e^{-k²var/2}
    let mut sum = 0.0;
    for k in 1..10_000u32 {
        let kf = f64::from(k);
        let damp = (-0.5 * kf * kf * var_phi).exp();
        let term = damp / (4.0 * kf * kf - 1.0);
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    Ok(2.0 * (2.0 / PI + 4.0 / PI * sum))
}

/// Effective band gap `V₀⟨sqrt(2(cos φ + 1))⟩` over the stationary phase
/// distribution.
pub fn effective_band_gap(v0: f64, var_phi: f64) -> Result<f64, AnalyticsError> {
    check_inputs(v0, None)?;
    if var_phi == 0.0 {
        return Ok(2.0 * v0);
    }
    Ok(v0 * mean_coupling_factor(var_phi)?)
}

/// Landau-Zener formula with the coupling replaced by the effective gap.
pub fn estimated_probability(
    v0: f64,
    f0: f64,
    var_phi: f64,
) -> Result<GapEstimate, AnalyticsError> {
    check_inputs(v0, Some(f0))?;
    let delta_e_eff = effective_band_gap(v0, var_phi)?;
    Ok(GapEstimate {
        delta_e_eff,
        p_est: lz_probability(delta_e_eff, f0)?,
    })
}
