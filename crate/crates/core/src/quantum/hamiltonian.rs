use num_complex::Complex64;

use super::SystemParams;

/// Hermitian 2×2 matrix stored by its independent entries, so it is exactly
/// Hermitian by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    pub h00: f64,
    pub h11: f64,
    /// Upper off-diagonal entry; the lower one is its conjugate.
    pub h01: Complex64,
}

impl Hermitian2 {
    pub const ZERO: Self = Self {
        h00: 0.0,
        h11: 0.0,
        h01: Complex64::new(0.0, 0.0),
    };

    pub fn diagonal(e0: f64, e1: f64) -> Self {
        Self {
            h00: e0,
            h11: e1,
            h01: Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.h00, 0.0), self.h01],
            [self.h01.conj(), Complex64::new(self.h11, 0.0)],
        ]
    }

    /// Pauli decomposition `H = c·I + a·σ`, returned as `(c, a_z, |a|)`;
    /// the transverse part of `a·σ` is `h01` itself.
    pub fn pauli(&self) -> (f64, f64, f64) {
        let c = 0.5 * (self.h00 + self.h11);
        let az = 0.5 * (self.h00 - self.h11);
        let r = (az * az + self.h01.norm_sqr()).sqrt();
        (c, az, r)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (c, _, r) = self.pauli();
        (c - r, c + r)
    }

    /// Normalized eigenvectors `(lower, upper)` as `[v0, v1]` amplitude pairs.
    pub fn eigenvectors(&self) -> ([Complex64; 2], [Complex64; 2]) {
        let (_, az, r) = self.pauli();
        let one = Complex64::new(1.0, 0.0);
        if r == 0.0 {
            return (
                [one, Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), one],
            );
        }
        // (a·σ) v = ±r v; pick the better conditioned of the two row forms
        let b = self.h01;
        let upper = if az >= 0.0 {
            [Complex64::new(az + r, 0.0), b.conj()]
        } else {
            [b, Complex64::new(r - az, 0.0)]
        };
        let lower = if az >= 0.0 {
            [-b, Complex64::new(az + r, 0.0)]
        } else {
            [Complex64::new(r - az, 0.0), -b.conj()]
        };
        (normalize(lower), normalize(upper))
    }
}

fn normalize(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Landau-Zener Hamiltonian with the phase-carrying coupling,
/// `[[-F₀t/2, (V₀/2)(1+e^{iφ})], [(V₀/2)(1+e^{-iφ}), F₀t/2]]`.
pub fn hamiltonian(sys: &SystemParams, t: f64, phi: f64) -> Hermitian2 {
    let (s, c) = phi.sin_cos();
    let half_v = 0.5 * sys.v0();
    let bias = 0.5 * sys.f0() * t;
    Hermitian2 {
        h00: -bias,
        h11: bias,
        h01: Complex64::new(half_v * (1.0 + c), half_v * s),
    }
}

/// Splitting of the two instantaneous eigenvalues,
/// `2·sqrt((F₀t/2)² + (V₀/2)²·2(1 + cos φ))`.
pub fn instantaneous_gap(sys: &SystemParams, t: f64, phi: f64) -> f64 {
    let bias = 0.5 * sys.f0() * t;
    let half_v = 0.5 * sys.v0();
    2.0 * (bias * bias + half_v * half_v * 2.0 * (1.0 + phi.cos())).sqrt()
}
