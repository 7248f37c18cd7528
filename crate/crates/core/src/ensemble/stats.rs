use serde::{Deserialize, Serialize};

use super::EnsembleError;

/// Per-realization values are kept up to this many realizations.
pub const MAX_RETAINED: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub index: u64,
    pub p_transition: f64,
}

/// Mean and standard error of the transition probability over realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionStatistics {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; zero for a single realization.
    pub std_error: f64,
    pub n: usize,
    pub per_realization: Option<Vec<Realization>>,
    /// Sum of squared deviations from the mean.
    m2: f64,
}

impl TransitionStatistics {
    /// Statistics of `values` in the given order, which fixes the floating
    /// point result.
    pub fn from_realizations(values: Vec<Realization>) -> Result<Self, EnsembleError> {
        let n = values.len();
        if n == 0 {
            return Err(EnsembleError::EmptyStatistics);
        }
        let mean = values.iter().map(|r| r.p_transition).sum::<f64>() / n as f64;
        let m2 = values
            .iter()
            .map(|r| (r.p_transition - mean).powi(2))
            .sum::<f64>();
        let keep = (n <= MAX_RETAINED).then_some(values);
        Ok(Self::assemble(mean, m2, n, keep))
    }

    pub fn from_values(values: &[f64]) -> Result<Self, EnsembleError> {
        Self::from_realizations(
            values
                .iter()
                .enumerate()
                .map(|(i, &p)| Realization {
                    index: i as u64,
                    p_transition: p,
                })
                .collect(),
        )
    }

    fn assemble(mean: f64, m2: f64, n: usize, per_realization: Option<Vec<Realization>>) -> Self {
        let std_error = if n > 1 {
            (m2 / (n as f64 - 1.0) / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n,
            per_realization,
            m2,
        }
    }

    /// Sample standard deviation of the realizations.
    pub fn std_dev(&self) -> f64 {
        if self.n > 1 {
            (self.m2 / (self.n as f64 - 1.0)).sqrt()
        } else {
            0.0
        }
    }
}

/// Pools two statistics over disjoint realization sets (Chan's update).
pub fn merge_statistics(
    a: &TransitionStatistics,
    b: &TransitionStatistics,
) -> Result<TransitionStatistics, EnsembleError> {
    if a.n == 0 || b.n == 0 {
        return Err(EnsembleError::EmptyStatistics);
    }
    let per_realization = match (&a.per_realization, &b.per_realization) {
        (Some(ra), Some(rb)) => {
            let mut all: Vec<Realization> = ra.iter().chain(rb).copied().collect();
            all.sort_by_key(|r| r.index);
            if let Some(w) = all.windows(2).find(|w| w[0].index == w[1].index) {
                return Err(EnsembleError::OverlappingRealizations(w[0].index));
            }
            (all.len() <= MAX_RETAINED).then_some(all)
        }
        _ => None,
    };
    let na = a.n as f64;
    let nb = b.n as f64;
    let n = na + nb;
    let delta = b.mean - a.mean;
    let mean = a.mean + delta * nb / n;
    let m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
    Ok(TransitionStatistics::assemble(
        mean,
        m2,
        a.n + b.n,
        per_realization,
    ))
}
