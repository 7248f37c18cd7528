//! Stochastic Heun integrator, kept as an independent cross-check of the
//! exact kernel.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{NoiseError, NoiseParams, NoiseState};

fn drift(params: &NoiseParams, x: NoiseState) -> NoiseState {
    let w2 = params.omega0() * params.omega0();
    NoiseState {
        phi: x.nu,
        nu: -2.0 * params.gamma() * x.nu - w2 * x.phi,
    }
}

/// Heun predictor-corrector step driven by a given Wiener increment `dw`
/// (variance `h`). The same increment enters both stages.
pub fn heun_step_with_increment(
    params: &NoiseParams,
    state: NoiseState,
    h: f64,
    dw: f64,
) -> NoiseState {
    let kick = params.diffusion().sqrt() * dw;
    let f0 = drift(params, state);
    let predictor = NoiseState {
        phi: state.phi + h * f0.phi,
        nu: state.nu + h * f0.nu + kick,
    };
    let f1 = drift(params, predictor);
    NoiseState {
        phi: state.phi + 0.5 * h * (f0.phi + f1.phi),
        nu: state.nu + 0.5 * h * (f0.nu + f1.nu) + kick,
    }
}

pub fn heun_step<R: Rng + ?Sized>(
    params: &NoiseParams,
    state: NoiseState,
    h: f64,
    rng: &mut R,
) -> Result<NoiseState, NoiseError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(NoiseError::InvalidStep(h));
    }
    let z: f64 = rng.sample(StandardNormal);
    Ok(heun_step_with_increment(params, state, h, h.sqrt() * z))
}

/// One-step transition moments of the Heun scheme, which is linear:
/// `x' = K x + L z` with `z ~ N(0, 1)`. Returns `(K x, L Lᵀ)`.
pub fn heun_transition_moments(
    params: &NoiseParams,
    state: NoiseState,
    h: f64,
) -> (NoiseState, [[f64; 2]; 2]) {
    let mean = heun_step_with_increment(params, state, h, 0.0);
    let kicked = heun_step_with_increment(params, state, h, h.sqrt());
    let l = [kicked.phi - mean.phi, kicked.nu - mean.nu];
    (
        mean,
        [[l[0] * l[0], l[0] * l[1]], [l[1] * l[0], l[1] * l[1]]],
    )
}
