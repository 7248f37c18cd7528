use std::f64::consts::PI;

use hnlz_core::analytics::{effective_band_gap, estimated_probability, lz_probability};
use hnlz_core::noise::path_rng;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// Monte Carlo mean and standard error of `V₀·sqrt(2(cos φ + 1))`.
fn monte_carlo_gap(v0: f64, var: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = path_rng(seed);
    let sd = var.sqrt();
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        let g = v0 * (2.0 * ((sd * z).cos() + 1.0)).sqrt();
        sum += g;
        sum2 += g * g;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var_g = (sum2 / nf - mean * mean) * nf / (nf - 1.0);
    (mean, (var_g / nf).sqrt())
}

#[test]
fn quadrature_agrees_with_monte_carlo() {
    for (i, var) in [0.1, 0.5, 2.0].into_iter().enumerate() {
        let (mc, se) = monte_carlo_gap(0.75, var, 10_000_000, 40 + i as u64);
        let q = effective_band_gap(0.75, var).unwrap();
        assert!((q - mc).abs() < 3.0 * se, "var {var}: {q} vs {mc} ± {se}");
        assert!((q - mc).abs() < 1e-3);
    }
}

#[test]
fn gap_is_monotone_and_bounded() {
    let v0 = 0.75;
    let lower = v0 * 4.0 / PI - 1e-6;
    let mut prev = effective_band_gap(v0, 0.0).unwrap();
    assert_eq!(prev, 2.0 * v0);
    for k in 1..=1000 {
        let var = k as f64 * 0.01;
        let g = effective_band_gap(v0, var).unwrap();
        assert!(g <= prev + 1e-6, "increase at var {var}: {prev} -> {g}");
        assert!(
            (lower..=2.0 * v0).contains(&g),
            "out of bounds at var {var}: {g}"
        );
        prev = g;
    }
}

#[test]
fn estimates_for_figure_parameters() {
    // every noise preset uses V₀ = 0.75, F₀ = 0.5 and one of these variances
    for var in [0.1, 0.5, 2.0] {
        let e = estimated_probability(0.75, 0.5, var).unwrap();
        assert!((0.985..=1.0).contains(&e.p_est), "var {var}: {}", e.p_est);
        // the quoted 0.989-0.999 band is approximate; var = 2 gives 0.98803
        let outside = (0.989 - e.p_est).max(e.p_est - 0.999).max(0.0);
        assert!(outside < 1e-3, "var {var}: {}", e.p_est);
    }
}

#[test]
fn zero_variance_is_the_full_gap_formula() {
    let e = estimated_probability(0.75, 0.5, 0.0).unwrap();
    assert_eq!(e.delta_e_eff, 1.5);
    assert_eq!(e.p_est, lz_probability(1.5, 0.5).unwrap());
    assert!((e.p_est - 0.99915).abs() < 1e-5);
}

proptest! {
    #[test]
    fn estimate_is_a_probability(v0 in 0.0f64..5.0, f0 in 1e-3f64..100.0, var in 0.0f64..50.0) {
        let e = estimated_probability(v0, f0, var).unwrap();
        prop_assert!((0.0..=1.0).contains(&e.p_est));
        prop_assert!(e.delta_e_eff >= 0.0 && e.delta_e_eff <= 2.0 * v0 * (1.0 + 1e-12));
    }

    #[test]
    fn lz_probability_increases_with_gap(a in 0.0f64..3.0, b in 0.0f64..3.0, f0 in 0.01f64..10.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(lz_probability(lo, f0).unwrap() <= lz_probability(hi, f0).unwrap());
    }
}
