//! Parallel, reproducible ensembles of trajectories.

mod seed;
mod stats;

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::noise::{
    generate_path, path_rng, DeterministicPhaseParams, NoiseError, NoiseParams, NoisePath,
};
use crate::quantum::{
    run_trajectory_with, PhaseSource, QuantumError, SystemParams, TimeGrid, TrajectoryOptions,
    NORM_TOLERANCE,
};

pub use seed::{derive_seed, mix64};
pub use stats::{merge_statistics, Realization, TransitionStatistics, MAX_RETAINED};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("ensemble needs at least one realization")]
    EmptyEnsemble,
    #[error("cannot build statistics from zero realizations")]
    EmptyStatistics,
    #[error("realization {0} appears in both ensembles")]
    OverlappingRealizations(u64),
    #[error("realization {index}: norm drifted by {drift:e}")]
    NormDrift { index: u64, drift: f64 },
    #[error("realization {index}: {source}")]
    Trajectory {
        index: u64,
        #[source]
        source: QuantumError,
    },
    #[error("realization {index}: {source}")]
    Noise {
        index: u64,
        #[source]
        source: NoiseError,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// How the coupling phase is chosen for each realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseModel {
    /// An independent harmonic-noise path per realization.
    HarmonicNoise(NoiseParams),
    /// Sinusoid whose initial phase is drawn uniformly from `[0, 2π)` per
    /// realization; the stored `phi0` is ignored.
    DeterministicAveraged(DeterministicPhaseParams),
    /// A single sinusoid with the given initial phase.
    DeterministicFixed(DeterministicPhaseParams),
    /// `φ ≡ 0`.
    Zero,
}

impl PhaseModel {
    /// Whether every realization would be identical, so one suffices.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, PhaseModel::DeterministicFixed(_) | PhaseModel::Zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    pub master_seed: u64,
    /// Worker threads; 0 uses rayon's global pool.
    pub threads: usize,
    pub options: TrajectoryOptions,
}

impl EnsembleConfig {
    pub fn new(n_realizations: usize, master_seed: u64) -> Self {
        Self {
            n_realizations,
            master_seed,
            threads: 0,
            options: TrajectoryOptions::default(),
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// Phase input of one realization, owning any sampled path.
#[derive(Debug, Clone, PartialEq)]
pub enum RealizedPhase {
    Zero,
    Deterministic(DeterministicPhaseParams),
    Noise(NoisePath),
}

impl RealizedPhase {
    pub fn source(&self) -> PhaseSource<'_> {
        match self {
            RealizedPhase::Zero => PhaseSource::Zero,
            RealizedPhase::Deterministic(p) => PhaseSource::Deterministic(*p),
            RealizedPhase::Noise(path) => PhaseSource::Noise(path),
        }
    }
}

/// Phase used by realization `index`, generated from `derive_seed(master, index)`.
pub fn realize_phase(
    grid: &TimeGrid,
    model: &PhaseModel,
    master_seed: u64,
    index: u64,
) -> Result<RealizedPhase, NoiseError> {
    let seed = derive_seed(master_seed, index);
    Ok(match model {
        PhaseModel::HarmonicNoise(params) => RealizedPhase::Noise(generate_path(
            params,
            grid.t_start(),
            grid.t_final(),
            grid.noise_step(),
            seed,
        )?),
        PhaseModel::DeterministicAveraged(det) => {
            let phi0 = path_rng(seed).random_range(0.0..TAU);
            RealizedPhase::Deterministic(det.with_phi0(phi0)?)
        }
        PhaseModel::DeterministicFixed(det) => RealizedPhase::Deterministic(*det),
        PhaseModel::Zero => RealizedPhase::Zero,
    })
}

/// Transition probability of realization `index`.
pub fn run_realization(
    sys: &SystemParams,
    grid: &TimeGrid,
    model: &PhaseModel,
    options: TrajectoryOptions,
    master_seed: u64,
    index: u64,
) -> Result<Realization, EnsembleError> {
    let phase = realize_phase(grid, model, master_seed, index)
        .map_err(|source| EnsembleError::Noise { index, source })?;
    let result = run_trajectory_with(sys, grid, phase.source(), options, |_, _| {})
        .map_err(|source| EnsembleError::Trajectory { index, source })?;
    if result.norm_drift.is_nan() || result.norm_drift >= NORM_TOLERANCE {
        return Err(EnsembleError::NormDrift {
            index,
            drift: result.norm_drift,
        });
    }
    Ok(Realization {
        index,
        p_transition: result.p_transition,
    })
}

/// Runs realizations `0..n` (only one for deterministic models) and reduces
/// them in index order, so the result does not depend on the thread count.
pub fn run_ensemble(
    sys: &SystemParams,
    grid: &TimeGrid,
    model: &PhaseModel,
    config: &EnsembleConfig,
) -> Result<TransitionStatistics, EnsembleError> {
    let n = if model.is_deterministic() {
        config.n_realizations.min(1)
    } else {
        config.n_realizations
    };
    run_indices(sys, grid, model, config, 0..n as u64)
}

/// Runs the realizations with the given indices; used to split an ensemble
/// into disjoint batches that are later pooled with [`merge_statistics`].
pub fn run_indices(
    sys: &SystemParams,
    grid: &TimeGrid,
    model: &PhaseModel,
    config: &EnsembleConfig,
    indices: std::ops::Range<u64>,
) -> Result<TransitionStatistics, EnsembleError> {
    if indices.is_empty() {
        return Err(EnsembleError::EmptyEnsemble);
    }
    let work = || {
        indices
            .clone()
            .into_par_iter()
            .map(|i| run_realization(sys, grid, model, config.options, config.master_seed, i))
            .collect::<Result<Vec<_>, _>>()
    };
    let values = if config.threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| EnsembleError::ThreadPool(e.to_string()))?
            .install(work)
    }?;
    TransitionStatistics::from_realizations(values)
}
