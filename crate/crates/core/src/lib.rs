//! Tridiagonal Laguerre β-ensembles in the regime `γ_n ≫ n`.
//!
//! The crate samples the tridiagonal model, maps Jacobi coefficients to
//! weighted spectral measures and back, evaluates the large and moderate
//! deviation rate functions of the weighted spectral measure, and runs seeded
//! Monte Carlo checks of the fluctuation results.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod moments;
pub mod poly;
pub mod quadrature;
pub mod rates;
pub mod rng;
pub mod spectral;

pub use ensembles::{EnsembleParams, RescalingMode};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentReport, GammaRule, MomentRoute, Statistic, Verdict};
pub use moments::{MeasureVariant, MomentSequence, SignedMeasureSpec};
pub use poly::Polynomial;
pub use rates::{AcPlusAtoms, RateValue};
pub use rng::RngState;
pub use spectral::{JacobiCoefficients, SpectralMeasure};
