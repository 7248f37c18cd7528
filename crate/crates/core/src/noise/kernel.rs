//! Exact transition kernel of the harmonic-noise SDE.
//!
//! The process is linear, `dx = A x dt + B dW` with
//! `A = [[0, 1], [-ω₀², -2Γ]]` and `B = (0, sqrt(4ΓT))ᵀ`, so one step of
//! length `h` is exactly `x' = M(h)·x + η` with `M(h) = exp(hA)` and `η`
//! Gaussian with covariance `Σ(h) = ∫₀ʰ e^{As} B Bᵀ e^{Aᵀs} ds`.
//!
//! Writing `q = ω₀² - Γ²`, `C = cos(√q h)` and `S = sin(√q h)/√q` (hyperbolic
//! for `q < 0`, series near `q = 0`),
//!
//! ```text
//! M(h) = e^{-Γh} [[C + ΓS, S], [-ω₀²S, C - ΓS]]
//! ```
//!
//! and, from the stationary covariance `P = diag(Var φ, T)`, `Σ = P - M P Mᵀ`.

use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{NoiseError, NoiseParams, NoiseState};
use crate::quadrature::{gauss_legendre, QuadratureRule};

/// Relative distance `|Γ - ω₀|/ω₀` below which the critically damped series is used.
pub const NEAR_CRITICAL_THRESHOLD: f64 = 1e-6;

/// Above this value of `h·max(ω₀, 2Γ)` the closed form for `Σ(h)` is used;
/// below it `Σ(h)` is integrated directly by Gauss-Legendre quadrature, where
/// the closed form `P - M P Mᵀ` would cancel to a few digits.
const SHORT_STEP_RATE: f64 = 1.0;

const GL_ORDER: usize = 24;

fn gl_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Damping regime of the noise oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Undamped,
    Underdamped,
    NearCritical,
    Overdamped,
}

impl Regime {
    pub fn of(params: &NoiseParams) -> Self {
        let g = params.gamma();
        let w = params.omega0();
        if g == 0.0 {
            Regime::Undamped
        } else if (g - w).abs() < NEAR_CRITICAL_THRESHOLD * w {
            Regime::NearCritical
        } else if g < w {
            Regime::Underdamped
        } else {
            Regime::Overdamped
        }
    }
}

/// Damped oscillator functions `(e^{-Γh}·C, e^{-Γh}·S)`.
fn damped_cs(params: &NoiseParams, regime: Regime, h: f64) -> (f64, f64) {
    let g = params.gamma();
    let w0 = params.omega0();
    match regime {
        Regime::Undamped => {
            let (s, c) = (w0 * h).sin_cos();
            (c, s / w0)
        }
        Regime::Underdamped => {
            let wd = ((w0 - g) * (w0 + g)).sqrt();
            let (s, c) = (wd * h).sin_cos();
            let e = (-g * h).exp();
            (e * c, e * s / wd)
        }
        Regime::Overdamped => {
            // e^{-Γh}cosh(κh) and e^{-Γh}sinh(κh)/κ without overflow
            let kappa = ((g - w0) * (g + w0)).sqrt();
            let slow = (-(g - kappa) * h).exp();
            let ratio = (-2.0 * kappa * h).exp();
            let c = 0.5 * slow * (1.0 + ratio);
            let s = slow * (-(-2.0 * kappa * h).exp_m1()) / (2.0 * kappa);
            (c, s)
        }
        Regime::NearCritical => {
            let q = (w0 - g) * (w0 + g);
            let x = -q * h * h;
            // C = Σ x^k/(2k)!, S = h Σ x^k/(2k+1)!
            let mut c = 1.0;
            let mut s = 1.0;
            let mut tc = 1.0;
            let mut ts = 1.0;
            for k in 1..200 {
                let kf = k as f64;
                tc *= x / ((2.0 * kf - 1.0) * (2.0 * kf));
                ts *= x / ((2.0 * kf) * (2.0 * kf + 1.0));
                c += tc;
                s += ts;
                if tc.abs() <= 1e-18 * c.abs() && ts.abs() <= 1e-18 * s.abs() {
                    break;
                }
            }
            let e = (-g * h).exp();
            (e * c, e * h * s)
        }
    }
}

/// Precomputed `M(h)` and the Cholesky factor of `Σ(h)` for a fixed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactKernel {
    h: f64,
    m: [[f64; 2]; 2],
    sigma: [[f64; 2]; 2],
    chol: [f64; 3],
}

impl ExactKernel {
    pub fn new(params: &NoiseParams, h: f64) -> Result<Self, NoiseError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(NoiseError::InvalidStep(h));
        }
        let regime = Regime::of(params);
        let g = params.gamma();
        let w2 = params.omega0() * params.omega0();
        let (c, s) = damped_cs(params, regime, h);
        let m = [[c + g * s, s], [-w2 * s, c - g * s]];

        let sigma = if regime == Regime::Undamped {
            [[0.0; 2]; 2]
        } else if h * params.omega0().max(2.0 * g) <= SHORT_STEP_RATE {
            short_step_covariance(params, regime, h)
        } else {
            let var = params.var_phi();
            let t = params.temperature();
            let one_minus_e = -(-2.0 * g * h).exp_m1();
            let s11 = var * (one_minus_e - 2.0 * g * c * s - 2.0 * g * g * s * s);
            let s22 = t * (one_minus_e + 2.0 * g * c * s - 2.0 * g * g * s * s);
            let s12 = 2.0 * g * t * s * s;
            [[s11, s12], [s12, s22]]
        };

        let l11 = sigma[0][0].max(0.0).sqrt();
        let l21 = if l11 > 0.0 { sigma[0][1] / l11 } else { 0.0 };
        let l22 = (sigma[1][1] - l21 * l21).max(0.0).sqrt();
        Ok(Self {
            h,
            m,
            sigma,
            chol: [l11, l21, l22],
        })
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Deterministic propagator `M(h) = exp(hA)`.
    pub fn propagator(&self) -> [[f64; 2]; 2] {
        self.m
    }

    /// Covariance `Σ(h)` of the injected noise.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        self.sigma
    }

    /// Conditional mean `M(h)·x`.
    pub fn mean(&self, state: NoiseState) -> NoiseState {
        NoiseState {
            phi: self.m[0][0] * state.phi + self.m[0][1] * state.nu,
            nu: self.m[1][0] * state.phi + self.m[1][1] * state.nu,
        }
    }

    /// Applies the kernel with explicit standard-normal variates `(z1, z2)`.
    pub fn apply(&self, state: NoiseState, z1: f64, z2: f64) -> NoiseState {
        let mean = self.mean(state);
        let [l11, l21, l22] = self.chol;
        NoiseState {
            phi: mean.phi + l11 * z1,
            nu: mean.nu + l21 * z1 + l22 * z2,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.chol == [0.0; 3]
    }

    pub fn sample<R: Rng + ?Sized>(&self, state: NoiseState, rng: &mut R) -> NoiseState {
        if self.is_deterministic() {
            return self.mean(state);
        }
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        self.apply(state, z1, z2)
    }
}

/// `Σ(h) = 4ΓT ∫₀ʰ m(s) m(s)ᵀ ds` with `m(s)` the second column of `M(s)`.
fn short_step_covariance(params: &NoiseParams, regime: Regime, h: f64) -> [[f64; 2]; 2] {
    let g = params.gamma();
    let rule = gl_rule();
    let half = 0.5 * h;
    let mut acc = [0.0; 3];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = half * (x + 1.0);
        let (cs, ss) = damped_cs(params, regime, s);
        let m0 = ss;
        let m1 = cs - g * ss;
        acc[0] += w * m0 * m0;
        acc[1] += w * m0 * m1;
        acc[2] += w * m1 * m1;
    }
    let scale = params.diffusion() * half;
    let s11 = scale * acc[0];
    let s12 = scale * acc[1];
    let s22 = scale * acc[2];
    [[s11, s12], [s12, s22]]
}

/// Draws `(φ, ν)` from the stationary distribution: independent Gaussians
/// with variances `Var(φ)` and `T`.
pub fn sample_equilibrium<R: Rng + ?Sized>(params: &NoiseParams, rng: &mut R) -> NoiseState {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    NoiseState {
        phi: params.var_phi().sqrt() * z1,
        nu: params.temperature().sqrt() * z2,
    }
}

/// One exact step of length `h` from `state`.
pub fn exact_step<R: Rng + ?Sized>(
    params: &NoiseParams,
    state: NoiseState,
    h: f64,
    rng: &mut R,
) -> Result<NoiseState, NoiseError> {
    Ok(ExactKernel::new(params, h)?.sample(state, rng))
}
