//! Python bindings for `laguerre_core`.
//!
//! Seeds are plain integers; every error surfaces as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use laguerre_core::cli::{emit_report, parse_polynomial, Format};
use laguerre_core::ensembles::{sample_laguerre_tridiagonal, sample_rescaled};
use laguerre_core::experiments::{self, predicted_clt as core_predicted_clt};
use laguerre_core::moments::{self, exact_identity_checks};
use laguerre_core::rates::{self, arcsine_density, semicircle_density, AcPlusAtoms as CoreAcPlusAtoms};
use laguerre_core::spectral::{eigen_spectral, measure_to_coefficients, moments_of_measure, moments_via_operator};
use laguerre_core::{GammaRule, MeasureVariant, RescalingMode, RngState, Statistic};

fn err(e: laguerre_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn variant(s: &str) -> PyResult<MeasureVariant> {
    match s {
        "standard" => Ok(MeasureVariant::Standard),
        "shifted" => Ok(MeasureVariant::Shifted),
        _ => Err(PyValueError::new_err(format!(
            "unknown variant '{s}' (standard|shifted)"
        ))),
    }
}

#[pyclass(frozen)]
struct EnsembleParams(laguerre_core::EnsembleParams);

#[pymethods]
impl EnsembleParams {
    #[new]
    #[pyo3(signature = (n, beta, gamma, mode = "standard"))]
    fn new(n: usize, beta: f64, gamma: f64, mode: &str) -> PyResult<Self> {
        let mode: RescalingMode = mode.parse().map_err(err)?;
        laguerre_core::EnsembleParams::new(n, beta, gamma, mode)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    /// Tridiagonal sample, rescaled according to the mode.
    fn sample(&self, seed: u64) -> PyResult<JacobiCoefficients> {
        sample_rescaled(&mut RngState::from_seed(seed), &self.0)
            .map(JacobiCoefficients)
            .map_err(err)
    }

    /// Tridiagonal sample without any rescaling.
    fn sample_raw(&self, seed: u64) -> PyResult<JacobiCoefficients> {
        sample_laguerre_tridiagonal(&mut RngState::from_seed(seed), &self.0)
            .map(JacobiCoefficients)
            .map_err(err)
    }

    fn sample_spectral_measure(&self, seed: u64) -> PyResult<SpectralMeasure> {
        self.sample(seed)?.spectral_measure()
    }

    fn __repr__(&self) -> String {
        format!(
            "EnsembleParams(n={}, beta={}, gamma={}, mode={:?})",
            self.0.n(),
            self.0.beta(),
            self.0.gamma(),
            self.0.mode()
        )
    }
}

#[pyclass(frozen)]
struct JacobiCoefficients(laguerre_core::JacobiCoefficients);

#[pymethods]
impl JacobiCoefficients {
    #[new]
    fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> PyResult<Self> {
        laguerre_core::JacobiCoefficients::new(diag, offdiag)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn diag(&self) -> Vec<f64> {
        self.0.diag().to_vec()
    }

    #[getter]
    fn offdiag(&self) -> Vec<f64> {
        self.0.offdiag().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    /// `[m_1, ..., m_order]` of the spectral measure, from the matrix directly.
    fn moments(&self, order: usize) -> Vec<f64> {
        moments_via_operator(&self.0, order).into_vec()
    }

    fn spectral_measure(&self) -> PyResult<SpectralMeasure> {
        eigen_spectral(&self.0).map(SpectralMeasure).map_err(err)
    }
}

#[pyclass(frozen)]
struct SpectralMeasure(laguerre_core::SpectralMeasure);

#[pymethods]
impl SpectralMeasure {
    #[new]
    fn new(atoms: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        laguerre_core::SpectralMeasure::new(atoms, weights)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn atoms(&self) -> Vec<f64> {
        self.0.atoms().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn moments(&self, order: usize) -> Vec<f64> {
        moments_of_measure(&self.0, order).into_vec()
    }

    /// Jacobi coefficients of the leading `order`-dimensional block.
    fn to_coefficients(&self, order: usize) -> PyResult<JacobiCoefficients> {
        measure_to_coefficients(&self.0, order)
            .map(JacobiCoefficients)
            .map_err(err)
    }
}

#[pyclass(frozen, get_all)]
struct ExperimentReport {
    statistic: String,
    n: usize,
    beta: f64,
    gamma: f64,
    zeta_or_xi: f64,
    replicates: usize,
    predicted_mean: f64,
    sample_mean: f64,
    se_mean: f64,
    z_score: f64,
    predicted_var: f64,
    sample_var: f64,
    verdict: String,
    verdict_rule: String,
    wall_time_secs: f64,
    diagnostics: Vec<(String, f64)>,
    csv: String,
}

impl ExperimentReport {
    fn from_core(r: laguerre_core::ExperimentReport) -> PyResult<Self> {
        let mut buf = Vec::new();
        emit_report(std::slice::from_ref(&r), Format::Csv, &mut buf).map_err(err)?;
        Ok(Self {
            verdict: r.verdict.as_str().to_string(),
            csv: String::from_utf8(buf).expect("csv is ascii"),
            statistic: r.statistic,
            n: r.n,
            beta: r.beta,
            gamma: r.gamma,
            zeta_or_xi: r.zeta_or_xi,
            replicates: r.replicates,
            predicted_mean: r.predicted_mean,
            sample_mean: r.sample_mean,
            se_mean: r.se_mean,
            z_score: r.z_score,
            predicted_var: r.predicted_var,
            sample_var: r.sample_var,
            verdict_rule: r.verdict_rule,
            wall_time_secs: r.wall_time_secs,
            diagnostics: r.diagnostics,
        })
    }
}

#[pymethods]
impl ExperimentReport {
    fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    fn __repr__(&self) -> String {
        format!(
            "ExperimentReport({}, mean={} vs {}, var={} vs {}, {})",
            self.statistic, self.sample_mean, self.predicted_mean, self.sample_var, self.predicted_var, self.verdict
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    n: usize,
    beta: f64,
    gamma_rule: &str,
    replicates: usize,
    seed: u64,
    statistic: Statistic,
    mode: &str,
    workers: Option<usize>,
) -> PyResult<experiments::ExperimentConfig> {
    let rule: GammaRule = gamma_rule.parse().map_err(err)?;
    let mut c = experiments::ExperimentConfig::new(n, beta, rule, replicates, seed, statistic);
    c.mode = mode.parse().map_err(err)?;
    c.workers = workers;
    Ok(c)
}

/// Central limit check for the polynomial statistic `poly`, e.g. `"x^3"`.
#[pyfunction]
#[pyo3(signature = (n, beta, gamma_rule, poly, replicates, seed, mode = "standard", workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_clt(
    py: Python<'_>,
    n: usize,
    beta: f64,
    gamma_rule: &str,
    poly: &str,
    replicates: usize,
    seed: u64,
    mode: &str,
    workers: Option<usize>,
) -> PyResult<ExperimentReport> {
    let p = parse_polynomial(poly).map_err(err)?;
    let c = config(
        n,
        beta,
        gamma_rule,
        replicates,
        seed,
        Statistic::Polynomial(p),
        mode,
        workers,
    )?;
    let r = py.detach(|| experiments::run_clt(&c)).map_err(err)?;
    ExperimentReport::from_core(r)
}

#[pyfunction]
#[pyo3(signature = (n, beta, gamma_rule, moment, replicates, seed, mode = "standard", workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_moment_convergence(
    py: Python<'_>,
    n: usize,
    beta: f64,
    gamma_rule: &str,
    moment: usize,
    replicates: usize,
    seed: u64,
    mode: &str,
    workers: Option<usize>,
) -> PyResult<ExperimentReport> {
    let c = config(
        n,
        beta,
        gamma_rule,
        replicates,
        seed,
        Statistic::Moment(moment),
        mode,
        workers,
    )?;
    let r = py.detach(|| experiments::run_moment_convergence(&c)).map_err(err)?;
    ExperimentReport::from_core(r)
}

#[pyfunction]
#[pyo3(signature = (n, beta, gamma_rule, moment, b_n, replicates, seed, mode = "standard", workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_mdp_centering(
    py: Python<'_>,
    n: usize,
    beta: f64,
    gamma_rule: &str,
    moment: usize,
    b_n: f64,
    replicates: usize,
    seed: u64,
    mode: &str,
    workers: Option<usize>,
) -> PyResult<ExperimentReport> {
    let mut c = config(
        n,
        beta,
        gamma_rule,
        replicates,
        seed,
        Statistic::Moment(moment),
        mode,
        workers,
    )?;
    c.b_n = Some(b_n);
    let r = py.detach(|| experiments::run_mdp_centering(&c)).map_err(err)?;
    ExperimentReport::from_core(r)
}

#[pyfunction]
#[pyo3(signature = (n, beta, tau, moment, replicates, seed, workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_mp_sanity(
    py: Python<'_>,
    n: usize,
    beta: f64,
    tau: f64,
    moment: usize,
    replicates: usize,
    seed: u64,
    workers: Option<usize>,
) -> PyResult<ExperimentReport> {
    let rule = format!("lin:{tau}");
    let c = config(
        n,
        beta,
        &rule,
        replicates,
        seed,
        Statistic::Moment(moment),
        "none",
        workers,
    )?;
    let r = py.detach(|| experiments::run_mp_sanity(&c)).map_err(err)?;
    ExperimentReport::from_core(r)
}

/// `(mean, variance)` of the limiting normal law of a polynomial statistic.
#[pyfunction]
#[pyo3(signature = (poly, zeta, variant = "standard"))]
fn predicted_clt(poly: &str, zeta: f64, variant: &str) -> PyResult<(f64, f64)> {
    let p = parse_polynomial(poly).map_err(err)?;
    core_predicted_clt(&p, zeta, self::variant(variant)?).map_err(err)
}

#[pyfunction]
fn semicircle_moments(order: usize) -> Vec<f64> {
    moments::semicircle_moments(order).into_vec()
}

#[pyfunction]
#[pyo3(signature = (xi, order, variant = "standard"))]
fn nu_moments(xi: f64, order: usize, variant: &str) -> PyResult<Vec<f64>> {
    let spec = laguerre_core::SignedMeasureSpec::new(xi, self::variant(variant)?).map_err(err)?;
    Ok(moments::nu_moments(spec, order).into_vec())
}

#[pyfunction]
fn mp_moments(order: usize, tau: f64) -> PyResult<Vec<f64>> {
    moments::mp_moments(order, tau).map(|m| m.into_vec()).map_err(err)
}

#[pyfunction]
fn f_outlier(x: f64) -> PyResult<f64> {
    rates::f_outlier(x).map_err(err)
}

/// LDP rate of a semicircle or arcsine bulk carrying the mass left over by `atoms`.
#[pyfunction]
#[pyo3(signature = (atoms = Vec::new(), bulk = "semicircle"))]
fn ldp_rate(atoms: Vec<(f64, f64)>, bulk: &str) -> PyResult<f64> {
    let scale = 1.0 - atoms.iter().map(|a| a.1).sum::<f64>();
    let mu = match bulk {
        "semicircle" => CoreAcPlusAtoms::new(move |x| scale * semicircle_density(x), atoms),
        "arcsine" => CoreAcPlusAtoms::new(move |x| scale * arcsine_density(x), atoms),
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown bulk '{bulk}' (semicircle|arcsine)"
            )))
        }
    }
    .map_err(err)?;
    rates::ldp_rate(&mu).map(|r| r.value()).map_err(err)
}

/// MDP rate of the moment vector `[m_1, m_2, ...]`.
#[pyfunction]
#[pyo3(signature = (moments, xi, variant = "standard", truncation = None))]
fn mdp_rate(moments: Vec<f64>, xi: f64, variant: &str, truncation: Option<usize>) -> PyResult<f64> {
    let m = laguerre_core::MomentSequence::new(moments).map_err(err)?;
    let k = truncation.unwrap_or(rates::DEFAULT_MDP_TRUNCATION.min(m.len()));
    rates::mdp_rate_series(&m, xi, self::variant(variant)?, k)
        .map(|r| r.value())
        .map_err(err)
}

/// `[(name, passed)]` for the exact identities of the moment map.
#[pyfunction]
fn identities(order: usize) -> PyResult<Vec<(String, bool)>> {
    Ok(exact_identity_checks(order)
        .map_err(err)?
        .into_iter()
        .map(|c| (c.name, c.passed))
        .collect())
}

#[pymodule]
fn laguerre(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<EnsembleParams>()?;
    m.add_class::<JacobiCoefficients>()?;
    m.add_class::<SpectralMeasure>()?;
    m.add_class::<ExperimentReport>()?;
    m.add_function(wrap_pyfunction!(run_clt, m)?)?;
    m.add_function(wrap_pyfunction!(run_moment_convergence, m)?)?;
    m.add_function(wrap_pyfunction!(run_mdp_centering, m)?)?;
    m.add_function(wrap_pyfunction!(run_mp_sanity, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_clt, m)?)?;
    m.add_function(wrap_pyfunction!(semicircle_moments, m)?)?;
    m.add_function(wrap_pyfunction!(nu_moments, m)?)?;
    m.add_function(wrap_pyfunction!(mp_moments, m)?)?;
    m.add_function(wrap_pyfunction!(f_outlier, m)?)?;
    m.add_function(wrap_pyfunction!(ldp_rate, m)?)?;
    m.add_function(wrap_pyfunction!(mdp_rate, m)?)?;
    m.add_function(wrap_pyfunction!(identities, m)?)?;
    Ok(())
}
