//! Power spectrum of the phase: the analytic Lorentzian-like form and an
//! averaged periodogram estimate from sampled paths.
//!
//! Both use the two-sided convention in angular frequency, so that
//! `∫_{-∞}^{∞} S(ω) dω = Var(φ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{NoiseError, NoiseParams, NoisePath};

/// `S_φ(ω) = 2ΓT / (π(4Γ²ω² + (ω² - ω₀²)²))`.
///
/// Without damping the spectrum collapses to a pair of delta peaks and is
/// rejected.
pub fn analytic_spectrum(params: &NoiseParams, omega: f64) -> Result<f64, NoiseError> {
    let g = params.gamma();
    if g == 0.0 {
        return Err(NoiseError::ZeroDamping);
    }
    let w2 = omega * omega;
    let detune = w2 - params.omega0() * params.omega0();
    Ok(2.0 * g * params.temperature() / (PI * (4.0 * g * g * w2 + detune * detune)))
}

/// Location of the spectral maximum, `sqrt(ω₀² - 2Γ²)` or zero when overdamped.
pub fn spectrum_peak(params: &NoiseParams) -> f64 {
    let w2 = params.omega0() * params.omega0();
    let d = w2 - 2.0 * params.gamma() * params.gamma();
    // within rounding of the boundary ω₀² = 2Γ² counts as overdamped
    if d > 4.0 * f64::EPSILON * w2 {
        d.sqrt()
    } else {
        0.0
    }
}

/// Periodogram averaged over segments and paths, sampled at
/// `ω_k = k·Δω` for `k = 0..=N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectrum {
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
    pub d_omega: f64,
    pub segment_len: usize,
    pub segments: usize,
}

impl EmpiricalSpectrum {
    /// Width of one frequency bin.
    pub fn bin_width(&self) -> f64 {
        self.d_omega
    }

    /// Integral over the whole real line, counting each `ω > 0` bin twice for
    /// its negative-frequency mirror.
    pub fn total_power(&self) -> f64 {
        let n = self.segment_len;
        let last = self.density.len() - 1;
        let mut sum = 0.0;
        for (k, &s) in self.density.iter().enumerate() {
            let mult = if k == 0 || (n.is_multiple_of(2) && k == last) {
                1.0
            } else {
                2.0
            };
            sum += mult * s;
        }
        sum * self.d_omega
    }

    /// Frequency of the largest bin.
    pub fn peak_omega(&self) -> f64 {
        let (k, _) =
            self.density
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &s)| {
                    if s > best.1 {
                        (k, s)
                    } else {
                        best
                    }
                });
        self.omega[k]
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Averaged periodogram of `φ` over all paths, using non-overlapping
/// rectangular segments of `segment_len` points (the whole path when `None`).
pub fn empirical_spectrum(
    paths: &[NoisePath],
    segment_len: Option<usize>,
) -> Result<EmpiricalSpectrum, NoiseError> {
    let first = paths.first().ok_or(NoiseError::EmptyEnsemble)?;
    if let Some(bad) = paths.iter().position(|p| !p.same_grid(first)) {
        return Err(NoiseError::GridMismatch { index: bad });
    }
    let n = segment_len.unwrap_or(first.len());
    if n < 2 || n > first.len() {
        return Err(NoiseError::InvalidSegment {
            segment_len: n,
            path_len: first.len(),
        });
    }
    let h = first.step();
    let per_path = first.len() / n;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let bins = n / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for path in paths {
        let phases = &path.values()[..per_path * n];
        for segment in phases.chunks_exact(n) {
            for (b, x) in buf.iter_mut().zip(segment) {
                *b = Complex64::new(x.phi, 0.0);
            }
            fft.process(&mut buf);
            for (a, c) in acc.iter_mut().zip(&buf) {
                *a += c.norm_sqr();
            }
        }
    }
    let segments = paths.len() * per_path;
    let d_omega = 2.0 * PI / (n as f64 * h);
    // |X_k|²·h/(2πN) per segment makes Σ_k S_k·Δω equal the mean square
    let norm = h / (2.0 * PI * n as f64 * segments as f64);
    Ok(EmpiricalSpectrum {
        omega: (0..bins).map(|k| k as f64 * d_omega).collect(),
        density: acc.into_iter().map(|a| a * norm).collect(),
        d_omega,
        segment_len: n,
        segments,
    })
}
