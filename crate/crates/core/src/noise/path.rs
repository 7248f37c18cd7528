use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernel::{sample_equilibrium, ExactKernel};
use super::{NoiseError, NoiseParams, NoisePath, NoiseState};

/// Upper bound on the number of grid points of a single path (~4 GiB).
pub const MAX_PATH_POINTS: usize = 1 << 28;

/// Random stream used for a path with the given seed.
pub fn path_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of grid intervals of length `h` spanning `[t_start, t_end]`.
pub fn grid_intervals(t_start: f64, t_end: f64, h: f64) -> Result<usize, NoiseError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(NoiseError::InvalidStep(h));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(NoiseError::InvalidInterval {
            start: t_start,
            end: t_end,
        });
    }
    let ratio = (t_end - t_start) / h;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(NoiseError::IncommensurateGrid {
            length: t_end - t_start,
            step: h,
        });
    }
    if n + 1.0 > MAX_PATH_POINTS as f64 {
        return Err(NoiseError::PathTooLong(n as usize + 1));
    }
    Ok(n as usize)
}

/// Samples a harmonic-noise path on `t_start + k·h`, starting from the
/// stationary distribution. The result depends only on the arguments.
pub fn generate_path(
    params: &NoiseParams,
    t_start: f64,
    t_end: f64,
    h: f64,
    seed: u64,
) -> Result<NoisePath, NoiseError> {
    let n = grid_intervals(t_start, t_end, h)?;
    let mut rng = path_rng(seed);
    let x0 = sample_equilibrium(params, &mut rng);
    let values = if params.gamma() == 0.0 {
        rotation_path(params.omega0(), x0, h, n)
    } else {
        let kernel = ExactKernel::new(params, h)?;
        let mut values = Vec::with_capacity(n + 1);
        let mut x = x0;
        values.push(x);
        for _ in 0..n {
            x = kernel.sample(x, &mut rng);
            values.push(x);
        }
        values
    };
    NoisePath::new(t_start, h, values)
}

/// Undamped oscillator evaluated in closed form at every grid point, so the
/// energy does not accumulate rounding drift along long paths.
fn rotation_path(omega0: f64, x0: NoiseState, h: f64, n: usize) -> Vec<NoiseState> {
    (0..=n)
        .map(|k| {
            let (s, c) = (omega0 * h * k as f64).sin_cos();
            NoiseState {
                phi: x0.phi * c + x0.nu / omega0 * s,
                nu: -omega0 * x0.phi * s + x0.nu * c,
            }
        })
        .collect()
}
