//! Monte Carlo checks of the samplers against independent oracles.

use laguerre_core::ensembles::{
    rescale, sample_chi_squared, sample_dirichlet, sample_laguerre_tridiagonal, sample_spectral_measure,
};
use laguerre_core::spectral::{eigen_spectral, moments_of_measure};
use laguerre_core::{EnsembleParams, RescalingMode, RngState};
use rand::Rng;

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// Kolmogorov–Smirnov distance of a sample to a continuous CDF.
fn ks_one_sample(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn chi_squared_two_dof_has_mean_two() {
    let mut rng = RngState::from_seed(1);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_chi_squared(&mut rng, 2.0).unwrap())
        .collect();
    let (m, _) = mean_var(&xs);
    assert!((m - 2.0).abs() < 0.01, "mean {m}");
}

#[test]
fn chi_squared_noninteger_dof_moments() {
    let mut rng = RngState::from_seed(2);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_chi_squared(&mut rng, 7.5).unwrap())
        .collect();
    let (m, v) = mean_var(&xs);
    assert!((m - 7.5).abs() < 0.02, "mean {m}");
    assert!((v - 15.0).abs() < 0.2, "variance {v}");
    assert!(xs.iter().all(|&x| x > 0.0));
}

#[test]
fn chi_squared_matches_cdf() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let mut rng = RngState::from_seed(3);
    for r in [0.3, 1.0, 4.5, 60.0] {
        let law = ChiSquared::new(r).unwrap();
        let mut xs: Vec<f64> = (0..50_000).map(|_| sample_chi_squared(&mut rng, r).unwrap()).collect();
        let d = ks_one_sample(&mut xs, |x| law.cdf(x));
        assert!(d < 0.01, "r = {r}: KS {d}");
    }
}

#[test]
fn dirichlet_symmetric_mean() {
    let mut rng = RngState::from_seed(4);
    let n = 100_000;
    let s: f64 = (0..n).map(|_| sample_dirichlet(&mut rng, 4, 1.0).unwrap()[0]).sum();
    assert!((s / n as f64 - 0.25).abs() < 0.005);
}

#[test]
fn dirichlet_two_coordinates_uniform() {
    let mut rng = RngState::from_seed(5);
    let mut xs: Vec<f64> = (0..100_000)
        .map(|_| sample_dirichlet(&mut rng, 2, 1.0).unwrap()[0])
        .collect();
    let d = ks_one_sample(&mut xs, |x| x.clamp(0.0, 1.0));
    assert!(d < 0.01, "KS {d}");
}

#[test]
fn one_by_one_model_is_chi_squared_two_gamma() {
    let p = EnsembleParams::new(1, 1.3, 4.0, RescalingMode::None).unwrap();
    let mut rng = RngState::from_seed(6);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| sample_laguerre_tridiagonal(&mut rng, &p).unwrap().diag()[0])
        .collect();
    let (m, _) = mean_var(&xs);
    assert!((m / 8.0 - 1.0).abs() < 0.01, "mean {m}");
}

#[test]
fn expected_trace_is_sum_of_diagonal_dofs() {
    // d₁ = z₁, d₂ = z₃ + z₂ with dof 2γ, 2γ - 2β', and β'·2.
    let (beta, gamma) = (2.0, 10.0);
    let bp = beta / 2.0;
    let expected = 2.0 * gamma + (2.0 * gamma - 2.0 * bp) + 2.0 * bp;
    let p = EnsembleParams::new(2, beta, gamma, RescalingMode::None).unwrap();
    let mut rng = RngState::from_seed(7);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| sample_laguerre_tridiagonal(&mut rng, &p).unwrap().diag().iter().sum())
        .collect();
    let (m, _) = mean_var(&xs);
    assert_eq!(expected, 40.0);
    assert!((m / expected - 1.0).abs() < 0.01, "mean trace {m}");
}

/// Unnormalized joint eigenvalue density at `n = 2`.
fn laguerre_density_n2(l1: f64, l2: f64, beta: f64, gamma: f64) -> f64 {
    if l1 <= 0.0 || l2 <= 0.0 {
        return 0.0;
    }
    let e = gamma - beta / 2.0 - 1.0;
    (l1 - l2).abs().powf(beta) * (l1 * l2).powf(e) * (-(l1 + l2) / 2.0).exp()
}

#[test]
fn eigenvalues_match_joint_density_by_rejection() {
    // β = 2, γ = 3: density ∝ (λ₁-λ₂)² λ₁ λ₂ e^{-(λ₁+λ₂)/2}. Uniform proposals on the
    // box [0, 50]² (mass outside is below e^{-20}) with the bound taken from a grid scan.
    let (beta, gamma) = (2.0, 3.0);
    let box_side = 50.0;
    let mut bound: f64 = 0.0;
    for i in 0..=500 {
        for j in 0..=500 {
            bound = bound.max(laguerre_density_n2(i as f64 * 0.1, j as f64 * 0.1, beta, gamma));
        }
    }
    let bound = 1.05 * bound;
    let draws = 100_000;
    let mut oracle = Vec::with_capacity(draws);
    let mut urng = RngState::from_seed(8);
    while oracle.len() < draws {
        let a = box_side * urng.random::<f64>();
        let b = box_side * urng.random::<f64>();
        let f = laguerre_density_n2(a, b, beta, gamma);
        assert!(f <= bound);
        if urng.random::<f64>() * bound < f {
            oracle.push((a.min(b), a.max(b)));
        }
    }
    let p = EnsembleParams::new(2, beta, gamma, RescalingMode::None).unwrap();
    let mut rng = RngState::from_seed(9);
    let model: Vec<(f64, f64)> = (0..draws)
        .map(|_| {
            let mu = eigen_spectral(&sample_laguerre_tridiagonal(&mut rng, &p).unwrap()).unwrap();
            (mu.atoms()[0], mu.atoms()[1])
        })
        .collect();
    let cdf =
        |s: &[(f64, f64)], x: f64, y: f64| s.iter().filter(|&&(a, b)| a <= x && b <= y).count() as f64 / s.len() as f64;
    let mut sup: f64 = 0.0;
    for i in 1..=30 {
        for j in 1..=30 {
            let (x, y) = (i as f64, j as f64);
            sup = sup.max((cdf(&oracle, x, y) - cdf(&model, x, y)).abs());
        }
    }
    assert!(sup < 0.02, "sup CDF distance {sup}");
}

#[test]
fn spectral_weights_are_dirichlet() {
    let p = EnsembleParams::new(5, 2.0, 40.0, RescalingMode::Standard).unwrap();
    let mut rng = RngState::from_seed(10);
    let draws = 10_000;
    let mut coords: Vec<Vec<f64>> = (0..5).map(|_| Vec::with_capacity(draws)).collect();
    for _ in 0..draws {
        let mu = sample_spectral_measure(&mut rng, &p).unwrap();
        assert!((mu.weights().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for (i, w) in mu.weights().iter().enumerate() {
            coords[i].push(*w);
        }
    }
    let mut drng = RngState::from_seed(11);
    let mut reference: Vec<f64> = (0..100_000)
        .map(|_| sample_dirichlet(&mut drng, 5, 1.0).unwrap()[0])
        .collect();
    for c in coords.iter_mut() {
        // Dirichlet(1,…,1) marginals are Beta(1, 4).
        let exact = ks_one_sample(&mut c.clone(), |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(4));
        let two = ks_two_sample(c, &mut reference);
        assert!(exact < 0.02, "KS against Beta(1,4): {exact}");
        assert!(two < 0.02, "two-sample KS against Dirichlet draws: {two}");
    }
}

#[test]
fn first_moment_is_top_left_entry() {
    let p = EnsembleParams::new(12, 1.0, 500.0, RescalingMode::Standard).unwrap();
    let mut rng = RngState::from_seed(12);
    for _ in 0..50 {
        let raw = sample_laguerre_tridiagonal(&mut rng, &p).unwrap();
        let j = rescale(&raw, &p).unwrap();
        let m1 = moments_of_measure(&eigen_spectral(&j).unwrap(), 1).get(1);
        assert!((m1 - j.diag()[0]).abs() < 1e-10);
    }
}

#[test]
fn shifted_and_standard_differ_by_constant() {
    let p = EnsembleParams::new(20, 2.0, 900.0, RescalingMode::Standard).unwrap();
    let q = p.with_mode(RescalingMode::Shifted);
    let raw = sample_laguerre_tridiagonal(&mut RngState::from_seed(13), &p).unwrap();
    let a = rescale(&raw, &p).unwrap();
    let b = rescale(&raw, &q).unwrap();
    let c = (20.0 * 2.0 / (2.0 * 900.0f64)).sqrt();
    for (x, y) in a.diag().iter().zip(b.diag()) {
        assert!((x - y - c).abs() < 1e-14);
    }
    assert_eq!(a.offdiag(), b.offdiag());
}
