use hnlz_core::noise::{
    analytic_spectrum, empirical_spectrum, exact_step, generate_path, heun_step,
    heun_transition_moments, path_rng, sample_equilibrium, spectrum_peak, ExactKernel, NoiseParams,
    NoisePath, NoiseState,
};
use proptest::prelude::*;

type Mat = [[f64; 2]; 2];

/// Sample mean and variance of a slice.
fn moments(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Standard error of the sample variance of a Gaussian.
fn var_se(var: f64, n: usize) -> f64 {
    var * (2.0 / (n as f64 - 1.0)).sqrt()
}

fn split(states: &[NoiseState]) -> (Vec<f64>, Vec<f64>) {
    (
        states.iter().map(|s| s.phi).collect(),
        states.iter().map(|s| s.nu).collect(),
    )
}

#[test]
fn equilibrium_moments() {
    let n = 1_000_000;
    let p = NoiseParams::new(0.05, 1.0, 0.5).unwrap();
    let mut rng = path_rng(11);
    let draws: Vec<NoiseState> = (0..n).map(|_| sample_equilibrium(&p, &mut rng)).collect();
    let (phi, nu) = split(&draws);
    let (m, v) = moments(&phi);
    assert!(m.abs() < 3.0 * (0.5 / n as f64).sqrt(), "mean {m}");
    assert!((v - 0.5).abs() < 3.0 * var_se(0.5, n), "var {v}");
    let cov = phi.iter().zip(&nu).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    assert!(
        cov.abs() < 3.0 * (0.5f64 * 1.0 / n as f64).sqrt(),
        "cov {cov}"
    );

    let q = NoiseParams::new(0.7, 2.0, 0.5).unwrap();
    assert_eq!(q.temperature(), 2.0);
    let draws: Vec<NoiseState> = (0..n).map(|_| sample_equilibrium(&q, &mut rng)).collect();
    let (_, nu) = split(&draws);
    let (_, v) = moments(&nu);
    assert!((v - 2.0).abs() < 3.0 * var_se(2.0, n), "var nu {v}");
}

/// Iterates the exact kernel from equilibrium and checks the marginal moments.
fn assert_stationary(p: &NoiseParams, h: f64, steps: usize, seed: u64) {
    let n = 100_000;
    let kernel = ExactKernel::new(p, h).unwrap();
    let mut rng = path_rng(seed);
    let states: Vec<NoiseState> = (0..n)
        .map(|_| {
            let mut x = sample_equilibrium(p, &mut rng);
            for _ in 0..steps {
                x = kernel.sample(x, &mut rng);
            }
            x
        })
        .collect();
    let (phi, nu) = split(&states);
    let (mphi, vphi) = moments(&phi);
    let (mnu, vnu) = moments(&nu);
    let (var, t) = (p.var_phi(), p.temperature());
    let ctx = format!("Γ={} h={h} steps={steps}", p.gamma());
    assert!(
        mphi.abs() < 3.0 * (var / n as f64).sqrt(),
        "{ctx}: mean φ {mphi}"
    );
    assert!(
        mnu.abs() < 3.0 * (t / n as f64).sqrt(),
        "{ctx}: mean ν {mnu}"
    );
    assert!(
        (vphi - var).abs() < 3.0 * var_se(var, n),
        "{ctx}: var φ {vphi}"
    );
    assert!((vnu - t).abs() < 3.0 * var_se(t, n), "{ctx}: var ν {vnu}");
}

#[test]
fn exact_kernel_preserves_equilibrium() {
    let mut seed = 100;
    for gamma in [0.05, 2.5] {
        let p = NoiseParams::new(gamma, 1.0, 0.5).unwrap();
        for (h, steps) in [(5e-4, 1), (0.1, 10), (0.7, 3), (4.0, 2)] {
            seed += 1;
            assert_stationary(&p, h, steps, seed);
        }
    }
    // near-critical branch
    let p = NoiseParams::new(1.0 + 1e-8, 1.0, 0.5).unwrap();
    assert_stationary(&p, 0.3, 5, 7);
}

/// RK4 with many substeps on dM/ds = A·M.
fn matrix_exponential(p: &NoiseParams, h: f64) -> Mat {
    let w2 = p.omega0().powi(2);
    let g2 = 2.0 * p.gamma();
    let f = |m: &Mat| -> Mat {
        let mut out = [[0.0; 2]; 2];
        for j in 0..2 {
            out[0][j] = m[1][j];
            out[1][j] = -w2 * m[0][j] - g2 * m[1][j];
        }
        out
    };
    let add = |a: &Mat, b: &Mat, s: f64| -> Mat {
        let mut o = *a;
        for i in 0..2 {
            for j in 0..2 {
                o[i][j] += s * b[i][j];
            }
        }
        o
    };
    let n = 20_000;
    let ds = h / n as f64;
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for _ in 0..n {
        let k1 = f(&m);
        let k2 = f(&add(&m, &k1, ds / 2.0));
        let k3 = f(&add(&m, &k2, ds / 2.0));
        let k4 = f(&add(&m, &k3, ds));
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += ds / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    m
}

#[test]
fn overdamped_one_step_mean_matches_ode_oracle() {
    let p = NoiseParams::from_temperature(2.5, 1.0, 0.01).unwrap();
    let h = 0.1;
    let oracle = matrix_exponential(&p, h);
    let kernel = ExactKernel::new(&p, h).unwrap();
    let m = kernel.propagator();
    for i in 0..2 {
        for j in 0..2 {
            assert!((m[i][j] - oracle[i][j]).abs() < 1e-12, "M[{i}][{j}]");
        }
    }
    let n = 100_000;
    let mut rng = path_rng(3);
    let start = NoiseState { phi: 1.0, nu: 0.0 };
    let phi: Vec<f64> = (0..n)
        .map(|_| exact_step(&p, start, h, &mut rng).unwrap().phi)
        .collect();
    let (mean, var) = moments(&phi);
    let se = (kernel.covariance()[0][0] / n as f64).sqrt();
    assert!(
        (mean - oracle[0][0]).abs() < 3.0 * se,
        "{mean} vs {}",
        oracle[0][0]
    );
    assert!((var - kernel.covariance()[0][0]).abs() < 3.0 * var_se(var, n));
}

fn mat_err(a: &Mat, b: &Mat) -> f64 {
    let mut e: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            e = e.max((a[i][j] - b[i][j]).abs());
        }
    }
    e
}

#[test]
fn heun_moments_converge_at_second_order() {
    let p = NoiseParams::new(0.05, 1.0, 0.5).unwrap();
    let start = NoiseState { phi: 1.0, nu: 0.0 };
    let hs = [0.1, 0.05, 0.025, 0.0125];
    // one-step defects per unit time
    let mut mean_err = Vec::new();
    let mut cov_err = Vec::new();
    for &h in &hs {
        let k = ExactKernel::new(&p, h).unwrap();
        let (mean, cov) = heun_transition_moments(&p, start, h);
        let exact = k.mean(start);
        mean_err.push((mean.phi - exact.phi).abs().max((mean.nu - exact.nu).abs()) / h);
        cov_err.push(mat_err(&cov, &k.covariance()) / h);
    }
    for errs in [&mean_err, &cov_err] {
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 2.0).abs() < 0.3, "slope {slope} from {errs:?}");
        }
    }
}

#[test]
fn heun_sampler_matches_its_moments() {
    let p = NoiseParams::new(0.05, 1.0, 0.5).unwrap();
    let start = NoiseState { phi: 1.0, nu: 0.0 };
    let h = 0.05;
    let n = 1_000_000;
    let mut rng = path_rng(21);
    let draws: Vec<NoiseState> = (0..n)
        .map(|_| heun_step(&p, start, h, &mut rng).unwrap())
        .collect();
    let (phi, nu) = split(&draws);
    let (mphi, vphi) = moments(&phi);
    let (mnu, vnu) = moments(&nu);
    let (mean, cov) = heun_transition_moments(&p, start, h);
    assert!((mphi - mean.phi).abs() < 3.0 * (cov[0][0] / n as f64).sqrt());
    assert!((mnu - mean.nu).abs() < 3.0 * (cov[1][1] / n as f64).sqrt());
    assert!((vphi - cov[0][0]).abs() < 3.0 * var_se(cov[0][0], n));
    assert!((vnu - cov[1][1]).abs() < 3.0 * var_se(cov[1][1], n));
    // and with the exact kernel up to O(h²) per unit time
    let k = ExactKernel::new(&p, h).unwrap();
    let exact = k.mean(start);
    assert!((mphi - exact.phi).abs() < 3.0 * (cov[0][0] / n as f64).sqrt() + h * h * h);
    assert!((vnu - k.covariance()[1][1]).abs() < 3.0 * var_se(cov[1][1], n) + h * h * h);
}

/// Stationary covariance of the linear Heun recursion `x' = K x + L z`, by
/// Smith doubling of `P = K P Kᵀ + Q`.
fn heun_stationary_covariance(p: &NoiseParams, h: f64) -> Mat {
    let (c0, q) = heun_transition_moments(p, NoiseState { phi: 1.0, nu: 0.0 }, h);
    let (c1, _) = heun_transition_moments(p, NoiseState { phi: 0.0, nu: 1.0 }, h);
    let mut a = [[c0.phi, c1.phi], [c0.nu, c1.nu]];
    let mul = |x: &Mat, y: &Mat| -> Mat {
        let mut o = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                o[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        o
    };
    let tr = |x: &Mat| -> Mat { [[x[0][0], x[1][0]], [x[0][1], x[1][1]]] };
    let mut pm = q;
    for _ in 0..64 {
        let apa = mul(&mul(&a, &pm), &tr(&a));
        for i in 0..2 {
            for j in 0..2 {
                pm[i][j] += apa[i][j];
            }
        }
        a = mul(&a, &a);
    }
    pm
}

#[test]
fn heun_stationary_variance_converges() {
    let p = NoiseParams::new(0.05, 1.0, 0.5).unwrap();
    // the error changes sign near h = 0.1, so stay in the asymptotic range
    let errs: Vec<f64> = [0.05, 0.025, 0.0125, 0.00625]
        .iter()
        .map(|&h| (heun_stationary_covariance(&p, h)[0][0] - 0.5).abs())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
    assert!(errs[3] < 2e-5, "{errs:?}");
}

#[test]
fn path_ensemble_variance() {
    let p = NoiseParams::new(0.05, 1.0, 0.5).unwrap();
    // per-path time averages of φ² are independent across paths
    let means: Vec<f64> = (0..1000u64)
        .map(|i| {
            let path = generate_path(&p, 0.0, 200.0, 0.5, 1000 + i).unwrap();
            path.phases().map(|x| x * x).sum::<f64>() / path.len() as f64
        })
        .collect();
    let (m, v) = moments(&means);
    let se = (v / means.len() as f64).sqrt();
    assert!((m - 0.5).abs() < 3.0 * se, "{m} ± {se}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn paths_are_deterministic(
        seed in any::<u64>(),
        gamma in 0.0f64..3.0,
        omega0 in 0.05f64..6.0,
        var in 0.01f64..3.0,
    ) {
        let p = NoiseParams::new(gamma, omega0, var).unwrap();
        let a = generate_path(&p, -5.0, 5.0, 0.01, seed).unwrap();
        let b = generate_path(&p, -5.0, 5.0, 0.01, seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert!(a.values().iter().all(|s| s.is_finite()));
    }

    #[test]
    fn undamped_paths_conserve_energy(seed in any::<u64>(), omega0 in 0.05f64..6.0) {
        let p = NoiseParams::new(0.0, omega0, 0.5).unwrap();
        let path = generate_path(&p, 0.0, 50.0, 0.01, seed).unwrap();
        let e0 = path.values()[0].energy(omega0);
        for s in path.values() {
            prop_assert!((s.energy(omega0) - e0).abs() <= 1e-10 * e0);
        }
    }
}

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, eps, 50)
}

#[test]
fn analytic_spectrum_integrates_to_variance() {
    let cases = [
        NoiseParams::new(0.05, 1.6, 0.5).unwrap(),
        NoiseParams::from_temperature(0.5, 5.0, 1.0).unwrap(),
        NoiseParams::from_temperature(2.5, 1.0, 0.01).unwrap(),
        NoiseParams::new(1.0, 1.0, 0.3).unwrap(),
        NoiseParams::new(0.01, 0.2, 2.0).unwrap(),
    ];
    for p in cases {
        let s = |w: f64| analytic_spectrum(&p, w).unwrap();
        let w0 = p.omega0();
        let cut = 200.0 * (w0 + p.gamma());
        let mut knots = vec![0.0, 0.5 * w0, w0, 2.0 * w0, 10.0 * w0, cut];
        knots.dedup();
        let body: f64 = knots
            .windows(2)
            .map(|k| simpson(&s, k[0], k[1], 1e-14))
            .sum();
        // S = c/(ω⁴ + aω² + b), expanded for ω > cut
        let c = 2.0 * p.gamma() * p.temperature() / std::f64::consts::PI;
        let a = 4.0 * p.gamma().powi(2) - 2.0 * w0 * w0;
        let b = w0.powi(4);
        let tail =
            c * (cut.powi(-3) / 3.0 - a * cut.powi(-5) / 5.0 + (a * a - b) * cut.powi(-7) / 7.0);
        let total = 2.0 * (body + tail);
        assert!(
            ((total - p.var_phi()) / p.var_phi()).abs() < 1e-6,
            "Γ={} ω₀={}: {total} vs {}",
            p.gamma(),
            w0,
            p.var_phi()
        );
    }
}

#[test]
fn analytic_spectrum_peaks() {
    let p = NoiseParams::from_temperature(0.5, 5.0, 1.0).unwrap();
    let w1 = spectrum_peak(&p);
    assert!((w1 - 24.5f64.sqrt()).abs() < 1e-12);
    let top = analytic_spectrum(&p, w1).unwrap();
    for k in 1..=2000 {
        let w = k as f64 * 0.005;
        if (w - w1).abs() > 1e-9 {
            assert!(analytic_spectrum(&p, w).unwrap() < top);
        }
    }
    let q = NoiseParams::from_temperature(2.5, 1.0, 0.01).unwrap();
    assert_eq!(spectrum_peak(&q), 0.0);
    let mut prev = analytic_spectrum(&q, 0.0).unwrap();
    for k in 1..=2000 {
        let s = analytic_spectrum(&q, k as f64 * 0.005).unwrap();
        assert!(s < prev);
        prev = s;
    }
}

fn ensemble(p: &NoiseParams, count: u64, duration: f64, h: f64, seed: u64) -> Vec<NoisePath> {
    (0..count)
        .map(|i| generate_path(p, 0.0, duration, h, seed + i).unwrap())
        .collect()
}

#[test]
fn empirical_spectrum_peak_and_power() {
    let p = NoiseParams::new(0.05, 1.6, 0.5).unwrap();
    let paths = ensemble(&p, 200, 400.0, 0.05, 500);
    let s = empirical_spectrum(&paths, None).unwrap();
    let bin = s.bin_width();
    assert!((bin - 2.0 * std::f64::consts::PI / 400.05).abs() < 1e-3);
    assert!(
        (s.peak_omega() - 1.5992).abs() <= bin,
        "peak {}",
        s.peak_omega()
    );
    assert!((s.peak_omega() - spectrum_peak(&p)).abs() <= bin);
    let power = s.total_power();
    assert!((power - 0.5).abs() < 0.05, "power {power}");
}

#[test]
fn empirical_spectrum_overdamped_is_decreasing() {
    let p = NoiseParams::from_temperature(2.5, 1.0, 0.01).unwrap();
    let paths = ensemble(&p, 200, 400.0, 0.05, 900);
    let s = empirical_spectrum(&paths, None).unwrap();
    // average into bands of width 0.25 to beat periodogram scatter
    let band = |lo: f64| -> f64 {
        let vals: Vec<f64> = s
            .omega
            .iter()
            .zip(&s.density)
            .filter(|(w, _)| **w > lo && **w <= lo + 0.25)
            .map(|(_, d)| *d)
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let bands: Vec<f64> = (0..20).map(|k| band(0.25 * k as f64)).collect();
    for w in bands.windows(2) {
        assert!(w[1] < w[0], "{bands:?}");
    }
}

#[test]
fn pure_tone_lands_in_one_bin() {
    let n = 4096;
    let h = 0.05;
    let omega0 = 2.0 * std::f64::consts::PI * 40.0 / (n as f64 * h);
    let p = NoiseParams::new(0.0, omega0, 0.5).unwrap();
    let paths = ensemble(&p, 3, (n - 1) as f64 * h, h, 1);
    assert_eq!(paths[0].len(), n);
    let s = empirical_spectrum(&paths, None).unwrap();
    let near: f64 = s
        .omega
        .iter()
        .zip(&s.density)
        .filter(|(w, _)| (**w - omega0).abs() <= s.bin_width() * 1.0001)
        .map(|(_, d)| 2.0 * d * s.bin_width())
        .sum();
    assert!((near / s.total_power() - 1.0).abs() < 1e-9);
}
