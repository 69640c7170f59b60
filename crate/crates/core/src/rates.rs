//! Rate functions of the large and moderate deviation results.
//!
//! The large deviation rate of a measure `μ` is
//! `K(μ_sc | μ) + Σ_{λ ∈ E(μ)} F(λ)` with `F(x) = ∫_2^{|x|} sqrt(y² - 4) dy`.
//! The moderate deviation rate of a moment sequence `m` is
//! `½ Σ_{k≥1} (∫ p_k d(μ_m - ν_ξ))²` over the orthonormal polynomials of the
//! semicircle law; it is evaluated both as that series and as
//! `½ ‖D⁻¹(m - D w)‖²`, and the two must agree.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::moments::{
    d_matrix, dw_vector, integrate_poly_against_moments, nu_density, nu_moments, semicircle_orthonormal_poly,
    MeasureVariant, MomentSequence, SignedMeasureSpec,
};
use crate::quadrature;

/// Default truncation order of the moderate deviation series.
pub const DEFAULT_MDP_TRUNCATION: usize = 15;
/// Default number of Gauss–Chebyshev nodes for the relative entropy term.
pub const DEFAULT_KL_NODES: usize = 4096;
/// Default number of semicircle Gauss nodes for the density form of the MDP rate.
pub const DEFAULT_MDP_DENSITY_NODES: usize = 64;
/// Bulk density values below this count as zero.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// A rate value, possibly `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateValue {
    Finite(f64),
    Infinite,
}

impl RateValue {
    /// Rounding can push a vanishing rate slightly below zero; such values are
    /// clipped, anything clearly negative is an error.
    fn finite(v: f64) -> Result<Self> {
        if v.is_nan() {
            return Err(Error::NumericalFailure("rate evaluated to NaN".into()));
        }
        if v < -1e-9 {
            return Err(Error::NumericalFailure(format!(
                "rate evaluated to negative value {v:e}"
            )));
        }
        Ok(if v.is_infinite() {
            Self::Infinite
        } else {
            Self::Finite(v.max(0.0))
        })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// Numeric value, `f64::INFINITY` for `+∞`.
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(v) => *v,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl std::ops::Add for RateValue {
    type Output = RateValue;

    fn add(self, rhs: RateValue) -> RateValue {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinite,
        }
    }
}

type Density = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability measure: an absolutely continuous part on `[-2, 2]` plus
/// finitely many atoms at `|λ| ≥ 2`.
pub struct AcPlusAtoms {
    density: Density,
    atoms: Vec<(f64, f64)>,
    bulk_mass: f64,
    nodes: usize,
}

impl std::fmt::Debug for AcPlusAtoms {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AcPlusAtoms")
            .field("atoms", &self.atoms)
            .field("bulk_mass", &self.bulk_mass)
            .finish_non_exhaustive()
    }
}

pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

pub fn arcsine_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        1.0 / (PI * (4.0 - x * x).sqrt())
    }
}

impl AcPlusAtoms {
    /// `density` is the Lebesgue density of the bulk on `(-2, 2)`; `atoms` are
    /// `(location, mass)` pairs. Total mass must be `1 ± 1e-8`.
    pub fn new<F>(density: F, atoms: Vec<(f64, f64)>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        for &(x, w) in &atoms {
            if !x.is_finite() || x.abs() < 2.0 {
                return Err(invalid(format!("atom at {x} lies inside (-2, 2)")));
            }
            if !(w > 0.0) {
                return Err(invalid(format!("atom at {x} has nonpositive mass {w}")));
            }
        }
        // Adaptive in θ (x = 2cos θ) so that jumps in the bulk density are resolved.
        let mut bad = None;
        let bulk_mass = quadrature::adaptive(
            |t| {
                let v = density(2.0 * t.cos());
                if !(v >= 0.0) || !v.is_finite() {
                    bad.get_or_insert(v);
                    return 0.0;
                }
                2.0 * v * t.sin()
            },
            0.0,
            PI,
            1e-12,
            1e-12,
        )?;
        if let Some(v) = bad {
            return Err(Error::InvalidInput(format!(
                "bulk density sample {v} is negative or not finite"
            )));
        }
        let total = bulk_mass + atoms.iter().map(|a| a.1).sum::<f64>();
        if (total - 1.0).abs() > 1e-8 {
            return Err(invalid(format!("total mass is {total}, expected 1")));
        }
        Ok(Self {
            density: Box::new(density),
            atoms,
            bulk_mass,
            nodes: DEFAULT_KL_NODES,
        })
    }

    pub fn semicircle() -> Self {
        Self::new(semicircle_density, vec![]).expect("semicircle law is a probability measure")
    }

    /// Overrides the number of quadrature nodes used for the entropy term.
    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes.max(1);
        self
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn bulk_mass(&self) -> f64 {
        self.bulk_mass
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }
}

/// `F(x) = ∫_2^{|x|} sqrt(y² - 4) dy = |x| sqrt(x² - 4)/2 - 2 log((|x| + sqrt(x² - 4))/2)`.
pub fn f_outlier(x: f64) -> Result<f64> {
    let a = x.abs();
    if !(a >= 2.0) {
        return Err(invalid(format!("F is defined for |x| >= 2, got {x}")));
    }
    let r = (a * a - 4.0).sqrt();
    // log((a + r)/2) = acosh(a/2), accurate near a = 2
    Ok(0.5 * a * r - 2.0 * (0.5 * a).acosh())
}

/// Relative entropy `K(μ_sc | μ) = ∫ log(f_sc / f_μ) f_sc dx` of the semicircle
/// law with respect to the bulk of `mu`.
pub fn kl_semicircle(mu: &AcPlusAtoms) -> Result<RateValue> {
    let (nodes, w) = quadrature::chebyshev_first_kind(mu.nodes);
    let mut total = 0.0;
    for &x in &nodes {
        let fsc = semicircle_density(x);
        let fmu = mu.density(x);
        if !fmu.is_finite() || fmu < 0.0 {
            return Err(Error::InvalidInput(format!("bulk density at {x} is {fmu}")));
        }
        if fmu < DENSITY_FLOOR {
            if fsc > 0.0 {
                return Ok(RateValue::Infinite);
            }
            continue;
        }
        total += fsc * (fsc / fmu).ln() * (4.0 - x * x).sqrt();
    }
    RateValue::finite(w * total)
}

/// Large deviation rate `K(μ_sc | μ) + Σ F(λ)` over the outlying atoms.
pub fn ldp_rate(mu: &AcPlusAtoms) -> Result<RateValue> {
    let kl = kl_semicircle(mu)?;
    let outliers = mu.atoms.iter().map(|&(x, _)| f_outlier(x)).sum::<Result<f64>>()?;
    Ok(kl + RateValue::finite(outliers)?)
}

fn check_truncation(m: &MomentSequence, truncation: usize) -> Result<()> {
    if truncation == 0 {
        return Err(invalid("truncation order must be at least 1"));
    }
    if m.len() < truncation {
        return Err(invalid(format!(
            "truncation {truncation} exceeds the {} available moments",
            m.len()
        )));
    }
    Ok(())
}

/// `∫ p_k d(μ_m - ν)` for `k = 1..=truncation`, with `μ_m - ν` of total mass zero.
pub fn mdp_projections(m: &MomentSequence, spec: SignedMeasureSpec, truncation: usize) -> Result<Vec<f64>> {
    check_truncation(m, truncation)?;
    let diff = m.truncate(truncation).sub(&nu_moments(spec, truncation));
    (1..=truncation)
        .map(|k| integrate_poly_against_moments(&semicircle_orthonormal_poly(k), &diff, 0.0))
        .collect()
}

/// `½ ‖D⁻¹(m - D w)‖²`.
pub fn mdp_rate_matrix_form(m: &MomentSequence, spec: SignedMeasureSpec, truncation: usize) -> Result<f64> {
    check_truncation(m, truncation)?;
    let d = d_matrix(truncation)?;
    let dw = d.apply(&dw_vector(truncation, spec.xi, spec.variant))?;
    let rhs: Vec<f64> = m.as_slice()[..truncation].iter().zip(&dw).map(|(a, b)| a - b).collect();
    Ok(0.5 * d.solve(&rhs)?.iter().map(|v| v * v).sum::<f64>())
}

/// Moderate deviation rate truncated after `truncation` orthonormal polynomials.
///
/// The series and the `D⁻¹` form are both evaluated; a disagreement beyond
/// `1e-10` (relative for large values) is reported as a numerical failure.
pub fn mdp_rate_series(m: &MomentSequence, xi: f64, variant: MeasureVariant, truncation: usize) -> Result<RateValue> {
    let spec = SignedMeasureSpec::new(xi, variant)?;
    let series = 0.5 * mdp_projections(m, spec, truncation)?.iter().map(|v| v * v).sum::<f64>();
    let matrix = mdp_rate_matrix_form(m, spec, truncation)?;
    if (series - matrix).abs() > 1e-10 * series.abs().max(1.0) {
        return Err(Error::NumericalFailure(format!(
            "series ({series:e}) and matrix ({matrix:e}) forms of the rate disagree"
        )));
    }
    RateValue::finite(series)
}

/// `dν/dμ_sc` at `x ∈ (-2, 2)`.
pub fn nu_sc_ratio(spec: SignedMeasureSpec, x: f64) -> Result<f64> {
    Ok(nu_density(spec, x)? / semicircle_density(x))
}

/// `½ ∫ (g - dν_ξ/dμ_sc)² dμ_sc` for a candidate density `g = dμ_m/dμ_sc`.
pub fn mdp_rate_density<G: Fn(f64) -> f64>(g: G, xi: f64, variant: MeasureVariant, nodes: usize) -> Result<RateValue> {
    let spec = SignedMeasureSpec::new(xi, variant)?;
    let (xs, ws) = quadrature::semicircle_gauss(nodes.max(1));
    let mut total = 0.0;
    for (&x, &w) in xs.iter().zip(&ws) {
        let gx = g(x);
        if !gx.is_finite() {
            return Err(Error::InvalidInput(format!("candidate density is {gx} at {x}")));
        }
        let diff = gx - nu_sc_ratio(spec, x)?;
        total += w * diff * diff;
    }
    RateValue::finite(0.5 * total)
}
