use num_complex::Complex64;

use super::{Hermitian2, TwoLevelState};

/// Applies `U = exp(-i·dt·H)` in closed form.
///
/// With `H = c·I + a·σ`, `U = e^{-ic·dt}(cos(|a|dt)·I - i·sin(|a|dt)/|a|·(a·σ))`.
/// The `sin(x)/|a|` factor switches to its Taylor series for small `|a|dt`.
pub fn propagate_step(state: TwoLevelState, h: &Hermitian2, dt: f64) -> TwoLevelState {
    let (c, az, r) = h.pauli();
    let x = r * dt;
    let cos = x.cos();
    let sinc = if x.abs() < 1e-4 {
        // sin(x)/r = dt·(1 - x²/6 + x⁴/120)
        let x2 = x * x;
        dt * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0))
    } else {
        x.sin() / r
    };
    let [a0, a1] = state.amplitudes();
    // (a·σ)ψ
    let s0 = a0 * az + h.h01 * a1;
    let s1 = h.h01.conj() * a0 - a1 * az;
    let minus_i_sinc = Complex64::new(0.0, -sinc);
    let mut b0 = a0 * cos + minus_i_sinc * s0;
    let mut b1 = a1 * cos + minus_i_sinc * s1;
    if c != 0.0 {
        let phase = Complex64::from_polar(1.0, -c * dt);
        b0 *= phase;
        b1 *= phase;
    }
    TwoLevelState::from_amplitudes_unchecked(b0, b1)
}
