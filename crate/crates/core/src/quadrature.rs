//! Quadrature rules used across the crate.
//!
//! All fixed rules live on `[-2, 2]`, the support of the semicircle and
//! arcsine laws. Nodes are open (never `±2`), which matters for densities
//! with endpoint singularities.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Chebyshev rule of the first kind on `[-2, 2]`.
///
/// Returns `(nodes, weight)` with `∫ f(x) / sqrt(4 - x²) dx ≈ weight · Σ f(nodes[j])`,
/// exact for polynomials of degree `< 2n`.
pub fn chebyshev_first_kind(n: usize) -> (Vec<f64>, f64) {
    let nodes = (1..=n)
        .map(|j| 2.0 * ((2 * j - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    (nodes, PI / n as f64)
}

/// Integrates `g` over `(-2, 2)` by writing `g = (g·sqrt(4-x²)) / sqrt(4-x²)`
/// and applying [`chebyshev_first_kind`].
pub fn integrate_open_interval<F: FnMut(f64) -> f64>(mut g: F, n: usize) -> f64 {
    let (nodes, w) = chebyshev_first_kind(n);
    let total: f64 = nodes.iter().map(|&x| g(x) * (4.0 - x * x).sqrt()).sum();
    w * total
}

/// Gauss rule for the semicircle law `sqrt(4-x²)/(2π) dx`.
///
/// These are the eigenpairs of the `n × n` free Jacobi matrix; the rule is exact
/// for polynomials of degree `≤ 2n - 1`.
pub fn semicircle_gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (n + 1) as f64;
    let scale = 2.0 / (n + 1) as f64;
    (1..=n)
        .map(|j| {
            let t = j as f64 * h;
            (2.0 * t.cos(), scale * t.sin().powi(2))
        })
        .unzip()
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate falls below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = kronrod15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::NumericalFailure("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::NumericalFailure(format!(
                "adaptive quadrature did not reach tolerance (error estimate {err:e})"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}
