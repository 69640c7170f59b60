//! Numerical results checked against oracles written in this file.

mod common;

use std::f64::consts::PI;

use common::{dense_power_moments, random_jacobi, sc_moment, simpson};
use laguerre_core::ensembles::sample_rescaled;
use laguerre_core::moments::{
    arcsine_moments, binomial_f64, integrate_poly_against_moments, mp_moment, mp_moments, nu_density, nu_moments,
    semicircle_moments, semicircle_orthonormal_poly,
};
use laguerre_core::rates::{
    arcsine_density, f_outlier, kl_semicircle, ldp_rate, mdp_projections, mdp_rate_density, mdp_rate_matrix_form,
    mdp_rate_series, semicircle_density, AcPlusAtoms,
};
use laguerre_core::spectral::{
    eigen_spectral, free_jacobi, measure_to_coefficients, moments_of_measure, moments_via_operator,
};
use laguerre_core::{
    EnsembleParams, MeasureVariant, MomentSequence, Polynomial, RescalingMode, RngState, SignedMeasureSpec,
};
use rand::Rng;

/// `∫_2^{|x|} sqrt(y² - 4) dy` with `y = 2 cosh t`.
fn f_oracle(x: f64) -> f64 {
    let top = (x.abs() / 2.0).acosh();
    simpson(&|t: f64| 4.0 * t.sinh().powi(2), 0.0, top, 1e-14)
}

#[test]
fn f_closed_form_matches_quadrature() {
    let mut worst: f64 = 0.0;
    for i in 0..=160 {
        let x = 2.0 + i as f64 * 0.05;
        for s in [x, -x] {
            worst = worst.max((f_outlier(s).unwrap() - f_oracle(s)).abs());
        }
    }
    assert!(worst <= 1e-10, "max error {worst:e}");
    assert!((f_outlier(3.0).unwrap() - 1.429_25).abs() < 5e-6);
}

#[test]
fn semicircle_moments_match_quadrature() {
    let m = semicircle_moments(20);
    for k in 1..=20 {
        let q = simpson(
            &|t: f64| {
                let x = 2.0 * t.cos();
                x.powi(k as i32) * 4.0 * t.sin().powi(2) / (2.0 * PI)
            },
            0.0,
            PI,
            1e-13,
        );
        assert!(
            (q - m.get(k)).abs() < 1e-10 * m.get(k).abs().max(1.0),
            "k = {k}: {q} vs {}",
            m.get(k)
        );
    }
    assert_eq!(m.get(20), 16796.0);
}

#[test]
fn arcsine_moments_are_central_binomials() {
    let m = arcsine_moments(12);
    for k in 1..=6 {
        assert_eq!(m.get(2 * k - 1), 0.0);
        assert_eq!(m.get(2 * k), binomial_f64(2 * k as u64, k as i64));
    }
}

/// Narayana form of the Marchenko–Pastur moments.
fn mp_oracle(k: usize, tau: f64) -> f64 {
    (0..k)
        .map(|j| {
            tau.powi(j as i32) / (j + 1) as f64
                * binomial_f64(k as u64, j as i64)
                * binomial_f64(k as u64 - 1, j as i64)
        })
        .sum()
}

#[test]
fn mp_moments_match_narayana() {
    for tau in [1.0, 0.5, 0.25, 0.9] {
        let m = mp_moments(8, tau).unwrap();
        for k in 1..=8 {
            let want = mp_oracle(k, tau);
            assert!((m.get(k) - want).abs() < 1e-10 * want, "tau {tau}, k {k}");
        }
        assert!((mp_moment(0, tau).unwrap() - 1.0).abs() < 1e-10);
    }
    assert!(mp_moments(3, 0.0).is_err());
    assert!(mp_moments(3, 1.5).is_err());
}

fn nu_density_oracle(xi: f64, variant: MeasureVariant, x: f64) -> f64 {
    match variant {
        MeasureVariant::Standard => xi / (2.0 * PI) * x * (x * x - 3.0) / (4.0 - x * x).sqrt(),
        MeasureVariant::Shifted => -xi / (2.0 * PI) * x * (4.0 - x * x).sqrt(),
    }
}

#[test]
fn nu_density_pointwise() {
    for variant in [MeasureVariant::Standard, MeasureVariant::Shifted] {
        let spec = SignedMeasureSpec::new(1.7, variant).unwrap();
        for i in 1..40 {
            let x = -2.0 + i as f64 * 0.1;
            assert!((nu_density(spec, x).unwrap() - nu_density_oracle(1.7, variant, x)).abs() < 1e-14);
        }
    }
    let one = SignedMeasureSpec::new(1.0, MeasureVariant::Standard).unwrap();
    assert!((nu_density(one, 1.0).unwrap() + 1.0 / (PI * 3f64.sqrt())).abs() < 1e-15);
}

#[test]
fn nu_moments_match_chebyshev_and_simpson_quadrature() {
    let nodes = 64;
    for variant in [MeasureVariant::Standard, MeasureVariant::Shifted] {
        for xi in [0.5, 1.0, 3.0] {
            let spec = SignedMeasureSpec::new(xi, variant).unwrap();
            let m = nu_moments(spec, 15);
            for k in 1..=15 {
                // First-kind Gauss–Chebyshev: ∫ g(x) dx = ∫ g·sqrt(4-x²) / sqrt(4-x²) dx.
                let cheb: f64 = (1..=nodes)
                    .map(|j| {
                        let x = 2.0 * ((2 * j - 1) as f64 * PI / (2 * nodes) as f64).cos();
                        x.powi(k as i32) * nu_density(spec, x).unwrap() * (4.0 - x * x).sqrt()
                    })
                    .sum::<f64>()
                    * PI
                    / nodes as f64;
                // Simpson in θ, x = 2cos θ, with the endpoint factor cancelled by hand.
                let simp = simpson(
                    &|t: f64| {
                        let x = 2.0 * t.cos();
                        let s = 2.0 * t.sin();
                        let smooth = match variant {
                            MeasureVariant::Standard => xi / (2.0 * PI) * x * (x * x - 3.0),
                            MeasureVariant::Shifted => -xi / (2.0 * PI) * x * s * s,
                        };
                        x.powi(k as i32) * smooth
                    },
                    0.0,
                    PI,
                    1e-13,
                );
                assert!(
                    (cheb - m.get(k)).abs() <= 1e-8,
                    "{variant:?} xi {xi} k {k}: {cheb} vs {}",
                    m.get(k)
                );
                assert!(
                    (simp - m.get(k)).abs() <= 1e-8,
                    "{variant:?} xi {xi} k {k}: {simp} vs {}",
                    m.get(k)
                );
            }
        }
    }
}

#[test]
fn nu_hat_first_moment_is_minus_xi() {
    let spec = SignedMeasureSpec::new(2.5, MeasureVariant::Shifted).unwrap();
    let q = simpson(
        &|t: f64| {
            let x = 2.0 * t.cos();
            x * nu_density_oracle(2.5, MeasureVariant::Shifted, x) * 2.0 * t.sin()
        },
        0.0,
        PI,
        1e-14,
    );
    assert!((q + 2.5).abs() < 1e-10);
    assert_eq!(nu_moments(spec, 1).get(1), -2.5);
}

#[test]
fn orthonormal_polynomials_are_orthonormal() {
    let polys: Vec<Polynomial> = (0..=12).map(semicircle_orthonormal_poly).collect();
    for i in 0..=12 {
        for j in 0..=12 {
            let v = simpson(
                &|t: f64| {
                    let x = 2.0 * t.cos();
                    polys[i].eval(x) * polys[j].eval(x) * 2.0 / PI * t.sin().powi(2)
                },
                0.0,
                PI,
                1e-14,
            );
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10, "<p{i}, p{j}> = {v}");
        }
    }
}

#[test]
fn free_jacobi_moments_are_catalan() {
    let j = free_jacobi(40).unwrap();
    let m = moments_of_measure(&eigen_spectral(&j).unwrap(), 10);
    let op = moments_via_operator(&j, 10);
    for k in 1..=10 {
        assert!((m.get(k) - sc_moment(k)).abs() < 1e-12, "k {k}");
        assert_eq!(op.get(k), sc_moment(k));
    }
}

#[test]
fn free_jacobi_closed_form_eigenpairs() {
    let n = 10;
    let mu = eigen_spectral(&free_jacobi(n).unwrap()).unwrap();
    for j in 1..=n {
        let t = j as f64 * PI / (n + 1) as f64;
        // Atoms are ascending; 2cos(jπ/(n+1)) is descending in j.
        let i = n - j;
        assert!((mu.atoms()[i] - 2.0 * t.cos()).abs() < 1e-10);
        assert!((mu.weights()[i] - 2.0 / (n + 1) as f64 * t.sin().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn operator_moments_match_dense_powers() {
    let mut rng = RngState::from_seed(21);
    for n in [1, 2, 7, 25] {
        let j = random_jacobi(&mut rng, n, 1.0, 0.5, 1.5);
        let op = moments_via_operator(&j, 12);
        let dense = dense_power_moments(&j, 12);
        for k in 1..=12 {
            assert!((op.get(k) - dense[k - 1]).abs() <= 1e-10 * dense[k - 1].abs().max(1.0));
        }
    }
}

#[test]
fn operator_and_measure_moments_agree_on_random_matrices() {
    let mut rng = RngState::from_seed(22);
    for _ in 0..20 {
        let j = random_jacobi(&mut rng, 50, 1.0, 0.5, 1.5);
        let a = moments_via_operator(&j, 20);
        let b = moments_of_measure(&eigen_spectral(&j).unwrap(), 20);
        for k in 1..=20 {
            assert!(
                (a.get(k) - b.get(k)).abs() <= 1e-10 * a.get(k).abs().max(1.0),
                "k {k}: {} vs {}",
                a.get(k),
                b.get(k)
            );
        }
    }
}

#[test]
fn operator_and_measure_moments_agree_on_sampled_matrices() {
    let p = EnsembleParams::new(100, 2.0, 100.0f64.powi(2), RescalingMode::Standard).unwrap();
    let mut rng = RngState::from_seed(23);
    for _ in 0..20 {
        let j = sample_rescaled(&mut rng, &p).unwrap();
        let a = moments_via_operator(&j, 20);
        let b = moments_of_measure(&eigen_spectral(&j).unwrap(), 20);
        for k in 1..=20 {
            assert!(
                (a.get(k) - b.get(k)).abs() <= 1e-10 * a.get(k).abs().max(1.0),
                "k {k}: {} vs {}",
                a.get(k),
                b.get(k)
            );
        }
    }
}

#[test]
fn szego_roundtrip() {
    let mut rng = RngState::from_seed(24);
    for n in [30, 50] {
        for _ in 0..50 {
            let j = random_jacobi(&mut rng, n, 1.0, 0.5, 1.5);
            let back = measure_to_coefficients(&eigen_spectral(&j).unwrap(), n).unwrap();
            let err = j
                .diag()
                .iter()
                .zip(back.diag())
                .chain(j.offdiag().iter().zip(back.offdiag()))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "n = {n}: roundtrip error {err:e}");
        }
    }
}

#[test]
fn ldp_rate_of_deficient_semicircle_with_outlier() {
    let mu = AcPlusAtoms::new(|x| 0.9 * semicircle_density(x), vec![(3.0, 0.1)]).unwrap();
    let want = (10.0f64 / 9.0).ln() + f_oracle(3.0);
    assert!((ldp_rate(&mu).unwrap().value() - want).abs() < 1e-8);
    assert!((want - (0.10536 + 1.42925)).abs() < 1e-4);
}

#[test]
fn kl_of_arcsine() {
    // High-resolution oracle in θ: f_sc/f_arc = (4 - x²)/2 and f_sc dx = (2/π) sin²θ dθ.
    let oracle = simpson(
        &|t: f64| {
            let s = t.sin();
            if s == 0.0 {
                return 0.0;
            }
            (2.0 * s * s).ln() * 2.0 / PI * s * s
        },
        0.0,
        PI,
        1e-14,
    );
    // The sum rule gives the same number from the coefficient side: c_1² = 2 and all other
    // coefficients are free, so the rate is 2 - 1 - ln 2.
    assert!((oracle - (1.0 - 2f64.ln())).abs() < 1e-10, "{oracle}");
    let mu = AcPlusAtoms::new(arcsine_density, vec![]).unwrap();
    let v = kl_semicircle(&mu).unwrap().value();
    assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
}

#[test]
fn ldp_positive_away_from_semicircle() {
    let cases: Vec<AcPlusAtoms> = vec![
        AcPlusAtoms::new(arcsine_density, vec![]).unwrap(),
        AcPlusAtoms::new(|x| 0.5 * semicircle_density(x), vec![(-2.5, 0.25), (4.0, 0.25)]).unwrap(),
        AcPlusAtoms::new(|x| 0.99 * semicircle_density(x), vec![(2.0, 0.01)]).unwrap(),
        AcPlusAtoms::new(|x| semicircle_density(x) * (1.0 + 0.3 * x), vec![]).unwrap(),
    ];
    for mu in &cases {
        assert!(ldp_rate(mu).unwrap().value() > 0.0);
    }
    assert!(ldp_rate(&AcPlusAtoms::semicircle()).unwrap().value() <= 1e-8);
}

#[test]
fn mdp_series_equals_matrix_form() {
    let mut rng = RngState::from_seed(25);
    for variant in [MeasureVariant::Standard, MeasureVariant::Shifted] {
        for k in 1..=15 {
            for _ in 0..5 {
                let m = MomentSequence::new((0..15).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
                let xi = rng.random_range(0.0..3.0);
                let spec = SignedMeasureSpec::new(xi, variant).unwrap();
                let series = 0.5 * mdp_projections(&m, spec, k).unwrap().iter().map(|v| v * v).sum::<f64>();
                let matrix = mdp_rate_matrix_form(&m, spec, k).unwrap();
                assert!(
                    (series - matrix).abs() <= 1e-10 * series.max(1.0),
                    "K {k}: {series} vs {matrix}"
                );
            }
        }
    }
}

/// Moments `∫ x^j g dμ_sc` of a polynomial density `g`.
fn moments_of_density(g: &Polynomial, order: usize) -> MomentSequence {
    let sc = semicircle_moments(order + g.degree());
    let mut m = Vec::with_capacity(order);
    for j in 1..=order {
        let shifted = g.mul(&Polynomial::monomial(j));
        m.push(integrate_poly_against_moments(&shifted, &sc, 1.0).unwrap());
    }
    MomentSequence::new(m).unwrap()
}

#[test]
fn mdp_series_equals_density_form_on_polynomial_densities() {
    let mut rng = RngState::from_seed(26);
    for deg in 1..=8 {
        for trial in 0..4 {
            // Zero-mass densities g = Σ_{k≥1} a_k p_k.
            let mut g = Polynomial::zero();
            for k in 1..=deg {
                g = g.add(&semicircle_orthonormal_poly(k).scale(rng.random_range(-1.0..1.0)));
            }
            let (xi, variant) = if trial % 2 == 0 {
                (0.0, MeasureVariant::Standard)
            } else {
                (rng.random_range(0.0..2.0), MeasureVariant::Shifted)
            };
            let m = moments_of_density(&g, 15);
            let series = mdp_rate_series(&m, xi, variant, 15).unwrap().value();
            let density = mdp_rate_density(|x| g.eval(x), xi, variant, 64).unwrap().value();
            assert!((series - density).abs() <= 1e-8, "deg {deg}: {series} vs {density}");
            // The k = 0 projection of a zero-mass difference vanishes.
            let diff = m.sub(&nu_moments(SignedMeasureSpec::new(xi, variant).unwrap(), 15));
            assert_eq!(
                integrate_poly_against_moments(&semicircle_orthonormal_poly(0), &diff, 0.0).unwrap(),
                0.0
            );
        }
    }
}

#[test]
fn mdp_rate_vanishes_at_corrective_moments() {
    for variant in [MeasureVariant::Standard, MeasureVariant::Shifted] {
        for xi in [0.0, 0.5, 1.0, 3.0] {
            let m = nu_moments(SignedMeasureSpec::new(xi, variant).unwrap(), 15);
            assert_eq!(mdp_rate_series(&m, xi, variant, 15).unwrap().value(), 0.0);
        }
    }
}

#[test]
fn mdp_density_examples() {
    let p2 = semicircle_orthonormal_poly(2);
    let v = mdp_rate_density(|x| p2.eval(x), 0.0, MeasureVariant::Standard, 64)
        .unwrap()
        .value();
    assert!((v - 0.5).abs() < 1e-12);
    let m = moments_of_density(&p2, 15);
    assert!((mdp_rate_series(&m, 0.0, MeasureVariant::Standard, 15).unwrap().value() - 0.5).abs() < 1e-12);
    let spec = SignedMeasureSpec::new(1.3, MeasureVariant::Shifted).unwrap();
    let exact = mdp_rate_density(
        |x| nu_density(spec, x).unwrap() / semicircle_density(x),
        1.3,
        MeasureVariant::Shifted,
        64,
    )
    .unwrap()
    .value();
    assert!(exact.abs() < 1e-8);
}

#[test]
fn p1_perturbation_has_rate_one_half() {
    // g = p₁ = x: moments m_k = m_{k+1}(μ_sc) = (1, 0, 2, 0, 5, …).
    let m = MomentSequence::new((1..=15).map(|k| sc_moment(k + 1)).collect()).unwrap();
    assert_eq!(&m.as_slice()[..5], &[1.0, 0.0, 2.0, 0.0, 5.0]);
    assert!((mdp_rate_series(&m, 0.0, MeasureVariant::Standard, 15).unwrap().value() - 0.5).abs() < 1e-12);
}
