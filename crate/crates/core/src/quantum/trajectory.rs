use crate::noise::{deterministic_phase, DeterministicPhaseParams, NoisePath};

use super::{
    hamiltonian, propagate_step, QuantumError, SystemParams, TimeGrid, TwoLevelState,
    NORM_TOLERANCE,
};

pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;
pub const DEFAULT_SAMPLE_EVERY: usize = 100;

/// Where the coupling phase comes from during propagation.
#[derive(Debug, Clone, Copy)]
pub enum PhaseSource<'a> {
    /// φ ≡ 0, the unperturbed Landau-Zener problem.
    Zero,
    Deterministic(DeterministicPhaseParams),
    /// Sampled noise on a grid of step `dt/2` covering `[-t_f, t_f]`.
    Noise(&'a NoisePath),
}

impl PhaseSource<'_> {
    fn check(&self, grid: &TimeGrid) -> Result<(), QuantumError> {
        let PhaseSource::Noise(path) = self else {
            return Ok(());
        };
        let h = grid.noise_step();
        if (path.step() - h).abs() > 1e-12 * h {
            return Err(QuantumError::PhaseGridMismatch(format!(
                "path step {} but dt/2 = {h}",
                path.step()
            )));
        }
        if (path.t0() - grid.t_start()).abs() > 1e-9 * grid.t_final() {
            return Err(QuantumError::PhaseGridMismatch(format!(
                "path starts at {} but the window starts at {}",
                path.t0(),
                grid.t_start()
            )));
        }
        let needed = 2 * grid.steps() + 1;
        if path.len() < needed {
            return Err(QuantumError::PhaseGridMismatch(format!(
                "path has {} points, {needed} needed to reach t_f",
                path.len()
            )));
        }
        Ok(())
    }

    /// Phase at the midpoint of propagation step `k`.
    #[inline]
    fn midpoint_phase(&self, k: usize, t_mid: f64) -> f64 {
        match self {
            PhaseSource::Zero => 0.0,
            PhaseSource::Deterministic(p) => deterministic_phase(p, t_mid),
            PhaseSource::Noise(path) => path.phi(2 * k + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    /// Trailing fraction of the sampled series that is averaged.
    pub tail_fraction: f64,
    /// Propagation steps between samples of `P(t)`.
    pub sample_every: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            tail_fraction: DEFAULT_TAIL_FRACTION,
            sample_every: DEFAULT_SAMPLE_EVERY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilitySample {
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    /// Diabatic transition probability averaged over the tail window.
    pub p_transition: f64,
    /// Samples of `P(t)` inside the tail window.
    pub p_series: Vec<ProbabilitySample>,
    /// Largest `| |c0|² + |c1|² - 1 |` seen along the trajectory.
    pub norm_drift: f64,
    pub final_state: TwoLevelState,
}

/// Mean of the last `⌈fraction·len⌉` samples.
pub fn tail_average(series: &[f64], fraction: f64) -> Result<f64, QuantumError> {
    if series.is_empty() {
        return Err(QuantumError::EmptySeries);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(QuantumError::InvalidFraction(fraction));
    }
    let count = tail_len(series.len(), fraction);
    let tail = &series[series.len() - count..];
    Ok(tail.iter().sum::<f64>() / count as f64)
}

fn tail_len(len: usize, fraction: f64) -> usize {
    // guard against 0.1·20 = 2.0000000000000004 rounding up to 3
    let raw = fraction * len as f64;
    let count = (raw - 1e-9 * raw).ceil() as usize;
    count.clamp(1, len)
}

/// Propagates from the lower diabatic state `(0,1)ᵀ` at `-t_f` to `+t_f` and
/// averages the population of `(1,0)ᵀ` over the tail of the window.
pub fn run_trajectory(
    sys: &SystemParams,
    grid: &TimeGrid,
    source: PhaseSource<'_>,
) -> Result<TrajectoryResult, QuantumError> {
    run_trajectory_with(sys, grid, source, TrajectoryOptions::default(), |_, _| {})
}

/// Like [`run_trajectory`], calling `observe(t, state)` at every sample point
/// (every `sample_every` steps, plus the final time).
pub fn run_trajectory_with<F>(
    sys: &SystemParams,
    grid: &TimeGrid,
    source: PhaseSource<'_>,
    options: TrajectoryOptions,
    mut observe: F,
) -> Result<TrajectoryResult, QuantumError>
where
    F: FnMut(f64, &TwoLevelState),
{
    source.check(grid)?;
    if !(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0) {
        return Err(QuantumError::InvalidFraction(options.tail_fraction));
    }
    if options.sample_every == 0 {
        return Err(QuantumError::InvalidGrid(
            "sample_every must be >= 1".into(),
        ));
    }

    let steps = grid.steps();
    let dt = grid.dt();
    let every = options.sample_every;
    let mut state = TwoLevelState::basis1();
    let mut samples = Vec::with_capacity(steps / every + 2);
    let mut norm_drift = 0.0f64;

    samples.push(ProbabilitySample {
        t: grid.time(0),
        p: state.population0(),
    });
    observe(grid.time(0), &state);
    for k in 0..steps {
        let t_mid = grid.time(k) + 0.5 * dt;
        let phi = source.midpoint_phase(k, t_mid);
        let h = hamiltonian(sys, t_mid, phi);
        state = propagate_step(state, &h, dt);
        norm_drift = norm_drift.max((state.norm_sqr() - 1.0).abs());
        let done = k + 1;
        if done % every == 0 || done == steps {
            let t = grid.time(done);
            samples.push(ProbabilitySample {
                t,
                p: state.population0(),
            });
            observe(t, &state);
        }
    }

    let probabilities: Vec<f64> = samples.iter().map(|s| s.p).collect();
    let p_transition = tail_average(&probabilities, options.tail_fraction)?.clamp(0.0, 1.0);
    let count = tail_len(samples.len(), options.tail_fraction);
    let p_series = samples.split_off(samples.len() - count);
    debug_assert!(norm_drift < NORM_TOLERANCE);
    Ok(TrajectoryResult {
        p_transition,
        p_series,
        norm_drift,
        final_state: state,
    })
}
