//! Reference moments, the corrective signed measures `ν_ξ` / `ν̂_ξ`, the
//! integer matrix `D` and the orthonormal polynomials of the semicircle law.
//!
//! `D` is the Jacobian of the map from Jacobi coefficients
//! `(d₁, c₁², d₂, c₂², …)` to moments, evaluated at the free Jacobi matrix.
//! Its two structural facts are checked exactly (integer arithmetic) here:
//! `D Dᵀ` is the covariance of the monomials under the semicircle law, and the
//! rows of `D⁻¹` carry the coefficients of the orthonormal polynomials with the
//! constant term dropped.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::Polynomial;
use crate::quadrature;

/// Largest order for which `D` is built in exact 64-bit arithmetic.
pub const MAX_D_ORDER: usize = 40;

/// Finite moment prefix `(m₁, …, m_K)`; `m₀` (the total mass) is not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    values: Vec<f64>,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("moment m_{} is not finite", k + 1)));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `m_k`, one-based.
    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.values.len(), "moment index {k} out of range");
        self.values[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn truncate(&self, k: usize) -> MomentSequence {
        Self::from_vec_unchecked(self.values[..k.min(self.values.len())].to_vec())
    }

    /// Entrywise difference over the common prefix.
    pub fn sub(&self, other: &MomentSequence) -> MomentSequence {
        Self::from_vec_unchecked(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> MomentSequence {
        Self::from_vec_unchecked(self.values.iter().map(|v| v * s).collect())
    }
}

/// Which corrective signed measure is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureVariant {
    /// `ν_ξ`, paired with centering by `2γ`.
    Standard,
    /// `ν̂_ξ`, paired with centering by `2γ + nβ`.
    Shifted,
}

/// A signed measure `ν_ξ` or `ν̂_ξ` of total mass zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedMeasureSpec {
    pub xi: f64,
    pub variant: MeasureVariant,
}

impl SignedMeasureSpec {
    pub fn new(xi: f64, variant: MeasureVariant) -> Result<Self> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(invalid(format!("xi must be a finite nonnegative real, got {xi}")));
        }
        Ok(Self { xi, variant })
    }
}

/// Exact binomial coefficient with `C(n, k) = 0` for `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> Result<u64> {
    if k < 0 || k as u64 > n {
        return Ok(0);
    }
    let k = (k as u64).min(n - k as u64);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r
            .checked_mul(n - i)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k}) exceeds 64 bits")))?
            / (i + 1);
    }
    Ok(r)
}

/// Binomial coefficient as a double: exact whenever the value fits in 128 bits
/// and rounds below 2⁵³, falling back to floating multiplication beyond that.
pub fn binomial_f64(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    let k = (k as u64).min(n - k as u64);
    let mut r: u128 = 1;
    for i in 0..k {
        match r.checked_mul((n - i) as u128) {
            Some(v) => r = v / (i + 1) as u128,
            None => {
                let mut f = r as f64;
                for j in i..k {
                    f = f * (n - j) as f64 / (j + 1) as f64;
                }
                return f;
            }
        }
    }
    r as f64
}

fn catalan_f64(k: u64) -> f64 {
    // C(2k, k) / (k + 1), divided exactly while it still fits.
    let mut r: u128 = 1;
    for i in 0..k {
        match r.checked_mul((2 * k - i) as u128) {
            Some(v) => r = v / (i + 1) as u128,
            None => return binomial_f64(2 * k, k as i64) / (k + 1) as f64,
        }
    }
    (r / (k as u128 + 1)) as f64
}

/// Moments of the semicircle law: odd ones vanish, `m_{2k}` is the `k`-th Catalan number.
pub fn semicircle_moments(order: usize) -> MomentSequence {
    MomentSequence::from_vec_unchecked((1..=order).map(semicircle_moment).collect())
}

/// Single semicircle moment `m_k`, including `m₀ = 1`.
pub fn semicircle_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        catalan_f64((k / 2) as u64)
    }
}

/// Moments of the arcsine law on `[-2, 2]`: `m_{2k} = C(2k, k)`.
pub fn arcsine_moments(order: usize) -> MomentSequence {
    let v = (1..=order)
        .map(|k| {
            if k % 2 == 1 {
                0.0
            } else {
                binomial_f64(k as u64, (k / 2) as i64)
            }
        })
        .collect();
    MomentSequence::from_vec_unchecked(v)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(invalid(format!("tau must lie in (0, 1], got {tau}")));
    }
    Ok(())
}

/// `∫ x^k dMP(τ)` for `k ≥ 0`, by adaptive quadrature.
///
/// Substituting `x = 1 + τ + 2√τ cos θ` turns the density into the smooth
/// integrand `(2/π) x^{k-1} sin²θ` on `[0, π]`.
pub fn mp_moment(k: usize, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let c = 1.0 + tau;
    let r = 2.0 * tau.sqrt();
    let power = k as i32 - 1;
    quadrature::adaptive(
        |theta| {
            let x = c + r * theta.cos();
            let s = theta.sin();
            (2.0 / PI) * x.powi(power) * s * s
        },
        0.0,
        PI,
        1e-14,
        1e-14,
    )
}

/// Moments `m₁..m_K` of the Marchenko–Pastur law `MP(τ)`, `0 < τ ≤ 1`.
pub fn mp_moments(order: usize, tau: f64) -> Result<MomentSequence> {
    check_tau(tau)?;
    let v = (1..=order).map(|k| mp_moment(k, tau)).collect::<Result<Vec<_>>>()?;
    Ok(MomentSequence::from_vec_unchecked(v))
}

/// `m_k` of `ν_ξ` or `ν̂_ξ`.
pub fn nu_moment(spec: SignedMeasureSpec, k: usize) -> f64 {
    if k.is_multiple_of(2) {
        return 0.0;
    }
    let k64 = k as u64;
    // (k - 3) / 2 is -1 at k = 1, where the binomial vanishes.
    let a = binomial_f64(k64, (k as i64 - 3) / 2);
    match spec.variant {
        MeasureVariant::Standard => {
            if k < 3 {
                0.0
            } else {
                spec.xi * a
            }
        }
        // The first moment is kept: the density -(ξ/2π) x sqrt(4-x²) has m₁ = -ξ.
        MeasureVariant::Shifted => spec.xi * (a - binomial_f64(k64, (k as i64 - 1) / 2)),
    }
}

/// Moments `m₁..m_K` of the corrective signed measure.
pub fn nu_moments(spec: SignedMeasureSpec, order: usize) -> MomentSequence {
    MomentSequence::from_vec_unchecked((1..=order).map(|k| nu_moment(spec, k)).collect())
}

/// Lebesgue density of `ν_ξ` (Standard) or `ν̂_ξ` (Shifted); zero off `[-2, 2]`.
///
/// The Standard density is singular at `±2` and is an error there.
pub fn nu_density(spec: SignedMeasureSpec, x: f64) -> Result<f64> {
    if x.abs() > 2.0 {
        return Ok(0.0);
    }
    let c = spec.xi / (2.0 * PI);
    match spec.variant {
        MeasureVariant::Standard => {
            if x.abs() == 2.0 {
                return Err(Error::Singularity(format!("density of nu_xi is singular at x = {x}")));
            }
            Ok(c * x * (x * x - 3.0) / (4.0 - x * x).sqrt())
        }
        MeasureVariant::Shifted => Ok(-c * x * (4.0 - x * x).sqrt()),
    }
}

/// Truncated integer matrix `D_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DMatrix {
    order: usize,
    entries: Vec<i64>,
}

/// Builds `D_K`: `D_{ij} = C(i, (i-j)/2) - C(i, (i-j)/2 - 1)` for `i ≥ j`, `i + j` even.
pub fn d_matrix(order: usize) -> Result<DMatrix> {
    if order == 0 {
        return Err(invalid("D matrix order must be at least 1"));
    }
    if order > MAX_D_ORDER {
        return Err(Error::Overflow(format!(
            "D matrix order {order} exceeds the exact-arithmetic cap {MAX_D_ORDER}"
        )));
    }
    let mut entries = vec![0i64; order * order];
    for i in 1..=order {
        for j in (1..=i).filter(|j| (i + j) % 2 == 0) {
            let h = ((i - j) / 2) as i64;
            let v = binomial(i as u64, h)? - binomial(i as u64, h - 1)?;
            entries[(i - 1) * order + (j - 1)] = v as i64;
        }
    }
    Ok(DMatrix { order, entries })
}

impl DMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `D_{ij}`, one-based.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.order + (j - 1)]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[(i - 1) * self.order..i * self.order]
    }

    /// `D v` in floating point.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        Ok((1..=self.order)
            .map(|i| self.row(i)[..i].iter().zip(v).map(|(&d, &x)| d as f64 * x).sum())
            .collect())
    }

    /// Solves `D x = v` by forward substitution (unit lower triangular).
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut x = vec![0.0; self.order];
        for i in 0..self.order {
            let row = self.row(i + 1);
            let acc: f64 = row[..i].iter().zip(&x).map(|(&d, &xj)| d as f64 * xj).sum();
            x[i] = v[i] - acc;
        }
        Ok(x)
    }

    /// `D Dᵀ` in exact integer arithmetic.
    pub fn gram(&self) -> Vec<Vec<i128>> {
        let k = self.order;
        (1..=k)
            .map(|i| {
                (1..=k)
                    .map(|j| {
                        self.row(i)
                            .iter()
                            .zip(self.row(j))
                            .map(|(&a, &b)| a as i128 * b as i128)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// `D⁻¹` in exact integer arithmetic (it is unit lower triangular with integer entries).
    #[allow(clippy::needless_range_loop)]
    pub fn inverse_exact(&self) -> Result<Vec<Vec<i64>>> {
        let k = self.order;
        let mut inv = vec![vec![0i64; k]; k];
        for col in 0..k {
            inv[col][col] = 1;
            for i in col + 1..k {
                let mut acc: i128 = 0;
                for l in col..i {
                    acc += self.entries[i * k + l] as i128 * inv[l][col] as i128;
                }
                inv[i][col] = i64::try_from(-acc)
                    .map_err(|_| Error::Overflow(format!("D^-1 entry ({}, {}) exceeds 64 bits", i + 1, col + 1)))?;
            }
        }
        Ok(inv)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order {
            return Err(invalid(format!(
                "vector length {len} does not match D order {}",
                self.order
            )));
        }
        Ok(())
    }
}

/// Solves `D_K x = v`.
pub fn d_inverse_apply(order: usize, v: &[f64]) -> Result<Vec<f64>> {
    d_matrix(order)?.solve(v)
}

/// Integer coefficients of the `k`-th orthonormal polynomial of the semicircle law,
/// `p₀ = 1`, `p₁ = x`, `p_{k+1} = x p_k - p_{k-1}`.
pub fn semicircle_orthonormal_poly_exact(k: usize) -> Result<Vec<i64>> {
    let mut prev: Vec<i64> = vec![];
    let mut cur: Vec<i64> = vec![1];
    for step in 0..k {
        let mut next = vec![0i64; cur.len() + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] = c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] = next[j]
                .checked_sub(c)
                .ok_or_else(|| Error::Overflow(format!("coefficient of p_{} exceeds 64 bits", step + 1)))?;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `p_k` as a floating-point polynomial.
pub fn semicircle_orthonormal_poly(k: usize) -> Polynomial {
    // Chebyshev-U recurrence in doubles; coefficients stay exact integers far beyond k = 40.
    let mut prev = Polynomial::zero();
    let mut cur = Polynomial::new(vec![1.0]);
    let x = Polynomial::monomial(1);
    for _ in 0..k {
        let next = x.mul(&cur).add(&prev.scale(-1.0));
        prev = cur;
        cur = next;
    }
    cur
}

/// `∫ p dν = Σ_{j≥1} c_j m_j(ν) + c₀ · mass`.
///
/// The total mass of `ν` is not part of a [`MomentSequence`] and must be declared:
/// `0` for the signed measures of the deviation results, `1` for probability measures.
pub fn integrate_poly_against_moments(p: &Polynomial, m: &MomentSequence, mass: f64) -> Result<f64> {
    if p.degree() > m.len() {
        return Err(invalid(format!(
            "polynomial of degree {} needs {} moments, only {} available",
            p.degree(),
            p.degree(),
            m.len()
        )));
    }
    let c = p.coeffs();
    Ok(c[0] * mass + c[1..].iter().zip(m.as_slice()).map(|(a, b)| a * b).sum::<f64>())
}

/// The vector `w` (Standard, `(0, 0, ξ, 0, ξ, …)`) or `ŵ` (Shifted, `(-ξ, 0, 0, …)`)
/// whose image under `D` is the moment sequence of the corrective measure.
pub fn dw_vector(order: usize, xi: f64, variant: MeasureVariant) -> Vec<f64> {
    (1..=order)
        .map(|k| match variant {
            MeasureVariant::Standard => {
                if k >= 3 && k % 2 == 1 {
                    xi
                } else {
                    0.0
                }
            }
            MeasureVariant::Shifted => {
                if k == 1 {
                    -xi
                } else {
                    0.0
                }
            }
        })
        .collect()
}

/// Outcome of one exact identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub order: usize,
    pub passed: bool,
    pub detail: String,
}

fn catalan_exact(k: u64) -> i128 {
    // C_{j+1} = C_j · 2(2j+1)/(j+2), exact at every step.
    let mut c: i128 = 1;
    for j in 0..k as i128 {
        c = c * 2 * (2 * j + 1) / (j + 2);
    }
    c
}

fn semicircle_moment_exact(k: usize) -> i128 {
    if k % 2 == 1 {
        0
    } else {
        catalan_exact(k as u64 / 2)
    }
}

/// `(D Dᵀ)_{ij} = m_{i+j} - m_i m_j` for the semicircle law, in integers.
pub fn check_gram_identity(order: usize) -> Result<IdentityCheck> {
    let g = d_matrix(order)?.gram();
    let mut mismatches = 0;
    for i in 1..=order {
        for j in 1..=order {
            let want = semicircle_moment_exact(i + j) - semicircle_moment_exact(i) * semicircle_moment_exact(j);
            if g[i - 1][j - 1] != want {
                mismatches += 1;
            }
        }
    }
    Ok(IdentityCheck {
        name: "d_gram_equals_semicircle_covariance".into(),
        order,
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatching entries"),
    })
}

/// `D w` equals the moments of `ν₁` (or `ŵ` those of `ν̂₁`), in integers.
pub fn check_dw_identity(order: usize, variant: MeasureVariant) -> Result<IdentityCheck> {
    let d = d_matrix(order)?;
    let w: Vec<i128> = dw_vector(order, 1.0, variant).iter().map(|&v| v as i128).collect();
    let mut mismatches = 0;
    for k in 1..=order {
        let got: i128 = d.row(k).iter().zip(&w).map(|(&a, &b)| a as i128 * b).sum();
        let want = if k % 2 == 0 {
            0
        } else {
            let a = binomial(k as u64, (k as i64 - 3) / 2)? as i128;
            match variant {
                MeasureVariant::Standard => a,
                MeasureVariant::Shifted => a - binomial(k as u64, (k as i64 - 1) / 2)? as i128,
            }
        };
        if got != want {
            mismatches += 1;
        }
    }
    let name = match variant {
        MeasureVariant::Standard => "dw_equals_nu_moments",
        MeasureVariant::Shifted => "dw_hat_equals_nu_hat_moments",
    };
    Ok(IdentityCheck {
        name: name.into(),
        order,
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatching moments"),
    })
}

/// Row `k` of `D⁻¹` holds the coefficients of `x, …, x^K` in `p_k`.
pub fn check_inverse_rows_identity(order: usize) -> Result<IdentityCheck> {
    let inv = d_matrix(order)?.inverse_exact()?;
    let mut mismatches = 0;
    for k in 1..=order {
        let p = semicircle_orthonormal_poly_exact(k)?;
        let want: Vec<i64> = (1..=order).map(|j| p.get(j).copied().unwrap_or(0)).collect();
        if inv[k - 1] != want {
            mismatches += 1;
        }
    }
    Ok(IdentityCheck {
        name: "d_inverse_rows_equal_orthonormal_polys".into(),
        order,
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatching rows"),
    })
}

/// Closed-form moments of `ν_ξ` / `ν̂_ξ` against Gauss–Chebyshev quadrature of the densities.
///
/// The error is measured relative to `max(1, ∫ |x|^k d|ν|)`, the size of the
/// terms being summed.
pub fn check_nu_quadrature(order: usize, xi: f64, variant: MeasureVariant, tol: f64) -> Result<IdentityCheck> {
    let spec = SignedMeasureSpec::new(xi, variant)?;
    let nodes = order + 8;
    let mut worst: f64 = 0.0;
    for k in 1..=order {
        let mut err = None;
        let mut magnitude = 0.0;
        let q = quadrature::integrate_open_interval(
            |x| match nu_density(spec, x) {
                Ok(v) => {
                    let y = v * x.powi(k as i32);
                    magnitude += y.abs() * (4.0 - x * x).sqrt();
                    y
                }
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            nodes,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let magnitude = magnitude * PI / nodes as f64;
        worst = worst.max((q - nu_moment(spec, k)).abs() / magnitude.max(1.0));
    }
    let name = match variant {
        MeasureVariant::Standard => "nu_moments_match_quadrature",
        MeasureVariant::Shifted => "nu_hat_moments_match_quadrature",
    };
    Ok(IdentityCheck {
        name: name.into(),
        order,
        passed: worst <= tol,
        detail: format!("max scaled error {worst:.3e} (xi = {xi}, tolerance {tol:e})"),
    })
}

/// All identity checks at one order.
pub fn exact_identity_checks(order: usize) -> Result<Vec<IdentityCheck>> {
    Ok(vec![
        check_gram_identity(order)?,
        check_dw_identity(order, MeasureVariant::Standard)?,
        check_dw_identity(order, MeasureVariant::Shifted)?,
        check_inverse_rows_identity(order)?,
        check_nu_quadrature(order, 1.0, MeasureVariant::Standard, 1e-8)?,
        check_nu_quadrature(order, 1.0, MeasureVariant::Shifted, 1e-8)?,
    ])
}
