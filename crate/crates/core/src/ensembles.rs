//! Sampling the tridiagonal Laguerre β-ensemble.
//!
//! With `β' = β/2` and independent `z_k`, `k = 1..2n-1`,
//! `z_k ~ χ²_{2γ - β'(k-1)}` for odd `k` and `z_k ~ χ²_{β'(2n-k)}` for even `k`,
//! the matrix with `d_k = z_{2k-1} + z_{2k-2}` (`z₀ = 0`) and
//! `c_k = sqrt(z_{2k-1} z_{2k})` has Laguerre eigenvalues, and its spectral
//! weights are Dirichlet(β') and independent of them.

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::RngState;
use crate::spectral::{eigen_spectral, JacobiCoefficients, SpectralMeasure};

/// How sampled coefficients are centred and scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RescalingMode {
    /// `(L - 2γ I) / sqrt(2γnβ)`.
    Standard,
    /// `(L - (2γ + nβ) I) / sqrt(2γnβ)`.
    Shifted,
    /// Raw coefficients.
    None,
}

impl std::str::FromStr for RescalingMode {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Self::Standard),
            "shifted" => Ok(Self::Shifted),
            "none" => Ok(Self::None),
            _ => Err(invalid(format!("unknown rescaling mode '{s}' (standard|shifted|none)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    n: usize,
    beta: f64,
    gamma: f64,
    mode: RescalingMode,
}

impl EnsembleParams {
    /// Requires `n ≥ 1`, `β > 0` and `γ > (n-1)β/2`.
    pub fn new(n: usize, beta: f64, gamma: f64, mode: RescalingMode) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix size n must be at least 1"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid(format!("beta must be positive and finite, got {beta}")));
        }
        let bound = (n - 1) as f64 * beta / 2.0;
        if !(gamma > bound) || !gamma.is_finite() {
            return Err(invalid(format!(
                "gamma must exceed (n-1)*beta/2 = {bound}, got {gamma}"
            )));
        }
        Ok(Self { n, beta, gamma, mode })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_prime(&self) -> f64 {
        self.beta / 2.0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> RescalingMode {
        self.mode
    }

    pub fn with_mode(self, mode: RescalingMode) -> Self {
        Self { mode, ..self }
    }

    /// `sqrt(2γnβ)`.
    pub fn scale(&self) -> f64 {
        (2.0 * self.gamma * self.n as f64 * self.beta).sqrt()
    }

    /// Degrees of freedom of `z_k`, `k = 1..=2n-1`.
    pub fn chi_squared_dof(&self, k: usize) -> f64 {
        let bp = self.beta_prime();
        if k % 2 == 1 {
            2.0 * self.gamma - bp * (k - 1) as f64
        } else {
            bp * (2 * self.n - k) as f64
        }
    }
}

fn gamma_draw(rng: &mut RngState, shape: f64, scale: f64) -> Result<f64> {
    let dist = Gamma::new(shape, scale).map_err(|e| invalid(format!("gamma({shape}, {scale}): {e}")))?;
    // An exact zero only arises from underflow at tiny shapes; it has probability zero.
    loop {
        let x = dist.sample(rng);
        if x > 0.0 {
            return Ok(x);
        }
    }
}

/// One draw from `χ²_r`, i.e. Gamma with shape `r/2` and scale 2.
pub fn sample_chi_squared(rng: &mut RngState, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid(format!(
            "chi-squared degrees of freedom must be positive, got {r}"
        )));
    }
    gamma_draw(rng, r / 2.0, 2.0)
}

/// Symmetric Dirichlet(β') vector of length `n`, as normalized Gamma(β', 1) draws.
pub fn sample_dirichlet(rng: &mut RngState, n: usize, beta_prime: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("Dirichlet dimension must be at least 1"));
    }
    if !(beta_prime > 0.0) || !beta_prime.is_finite() {
        return Err(invalid(format!(
            "Dirichlet parameter must be positive, got {beta_prime}"
        )));
    }
    let mut g = (0..n)
        .map(|_| gamma_draw(rng, beta_prime, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = g.iter().sum();
    g.iter_mut().for_each(|x| *x /= total);
    Ok(g)
}

/// Raw coefficients of the tridiagonal Laguerre model. `z₁..z_{2n-1}` are drawn in index order.
pub fn sample_laguerre_tridiagonal(rng: &mut RngState, params: &EnsembleParams) -> Result<JacobiCoefficients> {
    let n = params.n;
    let z = (1..2 * n)
        .map(|k| sample_chi_squared(rng, params.chi_squared_dof(k)))
        .collect::<Result<Vec<_>>>()?;
    // z[k - 1] holds z_k.
    let diag = (1..=n)
        .map(|k| z[2 * k - 2] + if k > 1 { z[2 * k - 3] } else { 0.0 })
        .collect();
    let offdiag = (1..n).map(|k| (z[2 * k - 2] * z[2 * k - 1]).sqrt()).collect();
    JacobiCoefficients::new(diag, offdiag)
}

/// Applies the centering and scaling selected by `params.mode()`.
pub fn rescale(coeffs: &JacobiCoefficients, params: &EnsembleParams) -> Result<JacobiCoefficients> {
    if coeffs.dim() != params.n {
        return Err(invalid(format!(
            "coefficients have dimension {}, parameters expect {}",
            coeffs.dim(),
            params.n
        )));
    }
    let scale = 1.0 / params.scale();
    match params.mode {
        RescalingMode::None => Ok(coeffs.clone()),
        RescalingMode::Standard => coeffs.affine(2.0 * params.gamma, scale),
        RescalingMode::Shifted => coeffs.affine(2.0 * params.gamma + params.n as f64 * params.beta, scale),
    }
}

/// Sampled, rescaled coefficients (the input to both moment routes).
pub fn sample_rescaled(rng: &mut RngState, params: &EnsembleParams) -> Result<JacobiCoefficients> {
    rescale(&sample_laguerre_tridiagonal(rng, params)?, params)
}

/// Spectral measure of the rescaled tridiagonal model.
pub fn sample_spectral_measure(rng: &mut RngState, params: &EnsembleParams) -> Result<SpectralMeasure> {
    eigen_spectral(&sample_rescaled(rng, params)?)
}
