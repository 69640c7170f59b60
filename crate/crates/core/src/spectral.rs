//! Finite Jacobi matrices and their spectral measures.
//!
//! The forward map (coefficients → measure) is an implicit-shift QL sweep that
//! only tracks the first row of the accumulated rotations, as in the
//! Golub–Welsch construction of Gauss rules. Those first components are only
//! accurate to `O(n ε)` in absolute terms, so each weight is then recomputed from
//! a twisted factorization of `J - λ I`, which resolves exponentially small
//! weights to high relative accuracy. The inverse map (measure →
//! coefficients) is the Stieltjes/Lanczos procedure run on the atoms with full
//! reorthogonalization.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::moments::MomentSequence;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 50;

/// Diagonal `d₁..d_n` and strictly positive off-diagonal `c₁..c_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiCoefficients {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiCoefficients {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("a Jacobi matrix needs at least one diagonal entry"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(invalid(format!(
                "expected {} off-diagonal entries for {} diagonal entries, got {}",
                diag.len() - 1,
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(invalid("diagonal entries must be finite"));
        }
        if let Some(k) = offdiag.iter().position(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(invalid(format!(
                "off-diagonal entry c_{} = {} is not strictly positive",
                k + 1,
                offdiag[k]
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Applies the same affine map to every entry: `d ↦ (d - shift)·scale`, `c ↦ c·scale`.
    pub(crate) fn affine(&self, shift: f64, scale: f64) -> Result<Self> {
        Self::new(
            self.diag.iter().map(|d| (d - shift) * scale).collect(),
            self.offdiag.iter().map(|c| c * scale).collect(),
        )
    }

    /// Leading `k × k` block.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(invalid(format!(
                "cannot truncate a {}-dimensional matrix to {k}",
                self.dim()
            )));
        }
        Self::new(self.diag[..k].to_vec(), self.offdiag[..k - 1].to_vec())
    }
}

/// `Σ w_i δ_{λ_i}` with increasing atoms and weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralMeasure {
    /// Validates sortedness (strict), nonnegative weights and total mass `1 ± 1e-10`.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(invalid(format!(
                "need equally many atoms and weights, got {} and {}",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(invalid("atoms and weights must be finite"));
        }
        if atoms.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("atoms must be strictly increasing"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(invalid("weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms, weights })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Pushes the atoms forward under `x ↦ a·x + b` (a > 0).
    pub fn map_atoms(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(invalid("atom map must be increasing"));
        }
        Self::new(self.atoms.iter().map(|x| a * x + b).collect(), self.weights.clone())
    }
}

/// Largest disagreement with the rotation-product weight for which the twisted
/// value is accepted.
const WEIGHT_REFINE_TOL: f64 = 1e-10;

/// `v₁² / ‖v‖²` for the eigenvector `v` of `J` at eigenvalue `lambda`, from the
/// twisted factorization `J - λI = N_r Δ N_rᵀ` twisted where `|γ_r|` is smallest.
/// Components are produced outward from `r`, along the decaying direction.
fn twisted_weight(j: &JacobiCoefficients, lambda: f64) -> f64 {
    let n = j.dim();
    if n == 1 {
        return 1.0;
    }
    let (d, c) = (&j.diag, &j.offdiag);
    let guard = |x: f64| {
        if x == 0.0 {
            f64::EPSILON * f64::MIN_POSITIVE.sqrt()
        } else {
            x
        }
    };
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    plus[0] = d[0] - lambda;
    for k in 1..n {
        plus[k] = (d[k] - lambda) - c[k - 1] * c[k - 1] / guard(plus[k - 1]);
    }
    minus[n - 1] = d[n - 1] - lambda;
    for k in (0..n - 1).rev() {
        minus[k] = (d[k] - lambda) - c[k] * c[k] / guard(minus[k + 1]);
    }
    let r = (0..n)
        .min_by(|&a, &b| {
            let ga = (plus[a] + minus[a] - (d[a] - lambda)).abs();
            let gb = (plus[b] + minus[b] - (d[b] - lambda)).abs();
            ga.total_cmp(&gb)
        })
        .unwrap_or(0);
    let mut v = vec![0.0; n];
    v[r] = 1.0;
    for k in (0..r).rev() {
        v[k] = -c[k] / guard(plus[k]) * v[k + 1];
    }
    for k in r + 1..n {
        v[k] = -c[k - 1] / guard(minus[k]) * v[k - 1];
    }
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    v[0] * v[0] / norm2
}

/// Spectral measure of the Jacobi matrix with respect to `e₁`.
pub fn eigen_spectral(j: &JacobiCoefficients) -> Result<SpectralMeasure> {
    let n = j.dim();
    let mut d = j.diag.clone();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&j.offdiag);
    // First row of the accumulated rotation product.
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NumericalFailure(format!(
                    "tridiagonal QL did not converge for a {n}x{n} matrix (eigenvalue {l})"
                )));
            }
            // Shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let atoms: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut weights: Vec<f64> = order
        .iter()
        .map(|&i| {
            let rotated = z[i] * z[i];
            let twisted = twisted_weight(j, d[i]);
            if twisted.is_finite() && (twisted - rotated).abs() <= WEIGHT_REFINE_TOL {
                twisted
            } else {
                rotated
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    SpectralMeasure::new(atoms, weights).map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::NumericalFailure(format!("eigen_spectral (n = {n}): {msg}")),
        other => other,
    })
}

/// `m_k = ⟨e₁, J^k e₁⟩` for `k = 1..=order` by repeated tridiagonal products.
///
/// After `k` products the iterate is supported on the first `k + 1` coordinates,
/// so the cost is `O(order²)` independent of the matrix size.
pub fn moments_via_operator(j: &JacobiCoefficients, order: usize) -> MomentSequence {
    let n = j.dim();
    let width = n.min(order + 1);
    let mut v = vec![0.0; width];
    let mut next = vec![0.0; width];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(order);
    for k in 1..=order {
        let support = width.min(k + 1);
        for i in 0..support {
            let mut acc = j.diag[i] * v[i];
            if i > 0 {
                acc += j.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < width {
                acc += j.offdiag[i] * v[i + 1];
            }
            next[i] = acc;
        }
        std::mem::swap(&mut v, &mut next);
        out.push(v[0]);
    }
    MomentSequence::from_vec_unchecked(out)
}

/// Pairwise (cascade) summation.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `m_k = Σ w_i λ_i^k` for `k = 1..=order`.
pub fn moments_of_measure(mu: &SpectralMeasure, order: usize) -> MomentSequence {
    let mut terms = mu.weights.clone();
    let mut out = Vec::with_capacity(order);
    for _ in 0..order {
        terms.iter_mut().zip(&mu.atoms).for_each(|(t, x)| *t *= x);
        out.push(pairwise_sum(&terms));
    }
    MomentSequence::from_vec_unchecked(out)
}

/// First `order` recursion coefficients of the orthonormal polynomials of `mu`
/// (the Szegő map), via Stieltjes/Lanczos with full reorthogonalization.
pub fn measure_to_coefficients(mu: &SpectralMeasure, order: usize) -> Result<JacobiCoefficients> {
    let n = mu.len();
    if order == 0 || order > n {
        return Err(invalid(format!(
            "can recover between 1 and {n} diagonal coefficients from {n} atoms, asked for {order}"
        )));
    }
    let scale = mu
        .atoms
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let breakdown = (n as f64) * f64::EPSILON * scale;

    // Polynomial values on the atoms, weighted by sqrt(w): q_k[i] = sqrt(w_i) p_k(λ_i).
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order);
    basis.push(mu.weights.iter().map(|w| w.sqrt()).collect());
    let mut diag = Vec::with_capacity(order);
    let mut offdiag = Vec::with_capacity(order.saturating_sub(1));

    for k in 0..order {
        let q = &basis[k];
        let alpha: f64 = q.iter().zip(&mu.atoms).map(|(qi, x)| x * qi * qi).sum();
        diag.push(alpha);
        if k + 1 == order {
            break;
        }
        let mut r: Vec<f64> = q.iter().zip(&mu.atoms).map(|(qi, x)| (x - alpha) * qi).collect();
        if k > 0 {
            let beta_prev = offdiag[k - 1];
            r.iter_mut()
                .zip(&basis[k - 1])
                .for_each(|(ri, qp)| *ri -= beta_prev * qp);
        }
        // Two Gram–Schmidt passes against every earlier vector.
        for _ in 0..2 {
            for b in &basis {
                let proj: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= proj * bi);
            }
        }
        let beta = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(beta > breakdown) {
            return Err(Error::NumericalFailure(format!(
                "Stieltjes breakdown at step {}: off-diagonal {beta:e} is not positive",
                k + 1
            )));
        }
        offdiag.push(beta);
        basis.push(r.into_iter().map(|x| x / beta).collect());
    }
    JacobiCoefficients::new(diag, offdiag)
}

/// Truncation of the free Jacobi matrix: zeros on the diagonal, ones beside it.
pub fn free_jacobi(n: usize) -> Result<JacobiCoefficients> {
    if n == 0 {
        return Err(invalid("free Jacobi truncation needs n >= 1"));
    }
    JacobiCoefficients::new(vec![0.0; n], vec![1.0; n - 1])
}
