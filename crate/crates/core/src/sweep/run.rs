use serde::{Deserialize, Serialize};

use crate::analytics::estimated_probability;
use crate::ensemble::{derive_seed, run_ensemble};

use super::{SweepError, SweepSpec};

pub const DEFAULT_SATURATION_WINDOW: (f64, f64) = (3.0, 6.0);
/// Fewest rows accepted inside a saturation window.
pub const MIN_SATURATION_ROWS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega0: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub p_est: f64,
    pub delta_e_eff: f64,
}

/// Master seed of the ensemble at `omega0`. Keyed by the frequency rather
/// than the grid index, so a point's result does not depend on the grid.
pub fn point_seed(master: u64, omega0: f64) -> u64 {
    derive_seed(master, omega0.to_bits())
}

/// Runs one ensemble per frequency, in increasing ω₀, handing each row to
/// `on_row` as soon as it is available.
pub fn run_sweep<F>(spec: &SweepSpec, mut on_row: F) -> Result<Vec<SweepRow>, SweepError>
where
    F: FnMut(&SweepRow) -> Result<(), SweepError>,
{
    let estimate = estimated_probability(spec.system.v0(), spec.system.f0(), spec.phase.var_phi())?;
    let mut rows = Vec::new();
    for omega0 in spec.frequencies() {
        let model = spec
            .phase
            .model(omega0)
            .map_err(|e| SweepError::invalid("noise", e.to_string()))?;
        let mut cfg = spec.ensemble;
        cfg.master_seed = point_seed(spec.ensemble.master_seed, omega0);
        let stats = run_ensemble(&spec.system, &spec.time, &model, &cfg)
            .map_err(|source| SweepError::Ensemble { omega0, source })?;
        let row = SweepRow {
            omega0,
            mean: stats.mean,
            std_error: stats.std_error,
            n: stats.n,
            p_est: estimate.p_est,
            delta_e_eff: estimate.delta_e_eff,
        };
        on_row(&row)?;
        rows.push(row);
    }
    Ok(rows)
}

/// Mean of the row means with ω₀ inside `[lo, hi]`.
pub fn saturation_value(rows: &[SweepRow], window: (f64, f64)) -> Result<f64, SweepError> {
    let (lo, hi) = window;
    let inside: Vec<f64> = rows
        .iter()
        .filter(|r| r.omega0 >= lo && r.omega0 <= hi)
        .map(|r| r.mean)
        .collect();
    if inside.len() < MIN_SATURATION_ROWS {
        return Err(SweepError::SaturationWindow {
            lo,
            hi,
            found: inside.len(),
        });
    }
    Ok(inside.iter().sum::<f64>() / inside.len() as f64)
}
