//! Python bindings: models, coefficients, block decompositions, bounds and
//! the Monte Carlo checks.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lweak_core::blocks::{decompose_values, BlockScheme};
use lweak_core::bounds::{self, BoundParams, LaplaceCondition, RateSchedule};
use lweak_core::coefficients::{self, GammaSequence};
use lweak_core::models::{self, InnovationLaw, ModelSpec, Transform};
use lweak_core::verify::{self, MCConfig, VerificationReport};

fn err(e: lweak_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn law_from(kind: &str, a: f64, b: f64, bound: f64) -> PyResult<InnovationLaw> {
    match kind {
        "uniform" => InnovationLaw::uniform(a, b).map_err(err),
        "rademacher" => Ok(InnovationLaw::Rademacher),
        "truncated_gaussian" => InnovationLaw::truncated_gaussian(bound).map_err(err),
        other => Err(PyValueError::new_err(format!(
            "unknown law {other:?}; expected uniform, rademacher or truncated_gaussian"
        ))),
    }
}

/// A stationary or cumulative-sum model of a centered sequence.
#[pyclass(name = "Model", module = "lweak", frozen)]
struct PyModel {
    inner: ModelSpec,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (law = "uniform", a = -1.0, b = 1.0, bound = 1.0))]
    fn iid(law: &str, a: f64, b: f64, bound: f64) -> PyResult<Self> {
        let inner = ModelSpec::iid(law_from(law, a, b, bound)?).map_err(err)?;
        Ok(PyModel { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (coeffs, law = "uniform", a = -1.0, b = 1.0, bound = 1.0))]
    fn moving_average(coeffs: Vec<f64>, law: &str, a: f64, b: f64, bound: f64) -> PyResult<Self> {
        let inner = ModelSpec::moving_average(coeffs, law_from(law, a, b, bound)?).map_err(err)?;
        Ok(PyModel { inner })
    }

    /// `transform` is `identity`, `neg_exp` or `gauss_bump_plus_x` (with `beta`).
    #[staticmethod]
    #[pyo3(signature = (coeffs, transform = "neg_exp", beta = 1.0, law = "uniform", a = -1.0, b = 1.0, bound = 1.0))]
    fn cum_sum_transform(
        coeffs: Vec<f64>,
        transform: &str,
        beta: f64,
        law: &str,
        a: f64,
        b: f64,
        bound: f64,
    ) -> PyResult<Self> {
        let transform = match transform {
            "identity" => Transform::Identity,
            "neg_exp" => Transform::NegExp,
            "gauss_bump_plus_x" => Transform::GaussBumpPlusX { beta },
            other => return Err(PyValueError::new_err(format!("unknown transform {other:?}"))),
        };
        let inner = ModelSpec::cum_sum_transform(coeffs, transform, law_from(law, a, b, bound)?).map_err(err)?;
        Ok(PyModel { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: ModelSpec::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn sample(&self, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        Ok(models::sample_path(&self.inner, n, seed).map_err(err)?.values)
    }

    fn sup_abs(&self) -> Option<f64> {
        self.inner.sup_abs()
    }

    fn covariance(&self, lag: usize) -> PyResult<f64> {
        models::analytic_covariance(&self.inner, lag).map_err(err)
    }

    /// `[γ_1, …, γ_k_max]`.
    fn gamma(&self, k_max: usize) -> PyResult<Vec<f64>> {
        let g = coefficients::gamma_sequence(&self.inner).map_err(err)?;
        Ok((1..=k_max).map(|k| g.gamma(k)).collect())
    }

    fn cox_grimmett(&self, n: usize) -> PyResult<f64> {
        Ok(coefficients::cox_grimmett(&self.gamma_sequence()?, n))
    }

    fn total_dependence(&self) -> PyResult<f64> {
        Ok(coefficients::total_dependence(&self.gamma_sequence()?))
    }

    fn newman_bound(&self, n: usize, t: f64) -> PyResult<f64> {
        Ok(coefficients::newman_discrepancy_bound(&self.gamma_sequence()?, n, t))
    }

    fn long_run_variance(&self) -> PyResult<f64> {
        Ok(coefficients::long_run_variance(&self.inner).map_err(err)?.sigma2)
    }

    fn __repr__(&self) -> String {
        format!("Model({:?})", self.inner)
    }
}

impl PyModel {
    fn gamma_sequence(&self) -> PyResult<GammaSequence> {
        coefficients::gamma_sequence(&self.inner).map_err(err)
    }
}

/// Block sums, alternating sums and remainder of `values` with block length `p_n`.
#[pyfunction]
fn decompose<'py>(py: Python<'py>, values: Vec<f64>, p_n: usize) -> PyResult<Bound<'py, PyDict>> {
    let scheme = BlockScheme::new(values.len(), p_n).map_err(err)?;
    let d = decompose_values(&values, &scheme).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("blocks", d.blocks)?;
    out.set_item("z_odd", d.z_odd)?;
    out.set_item("z_even", d.z_even)?;
    out.set_item("remainder", d.remainder)?;
    out.set_item("r_n", scheme.r_n)?;
    Ok(out)
}

#[pyfunction]
fn block_length(n: usize, theta: f64) -> usize {
    lweak_core::blocks::block_length(n, theta)
}

/// Explicit tail bound on `P(Z_od > x)`; returns `(value, valid)`.
#[pyfunction]
#[pyo3(signature = (x, c, sigma2, p_n, d_n, n, v_pn = 0.0))]
fn tail_bound(x: f64, c: f64, sigma2: f64, p_n: usize, d_n: f64, n: usize, v_pn: f64) -> PyResult<(f64, bool)> {
    let params = BoundParams::new(c, sigma2, p_n, d_n, n).map_err(err)?;
    let b = bounds::tail_bound(x, &params, v_pn);
    Ok((b.value, b.valid))
}

fn schedule_dict<'py>(py: Python<'py>, s: &RateSchedule) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("n", s.n)?;
    out.set_item("p_n", s.p_n)?;
    out.set_item("d_n", s.d_n)?;
    out.set_item("epsilon_n", s.epsilon_n)?;
    out.set_item("t", s.t)?;
    out.set_item("c_n", s.c_n)?;
    out.set_item("tail_term", s.tail_term)?;
    out.set_item("rate_exponent", s.rate_exponent)?;
    out.set_item("admissible", s.is_admissible())?;
    Ok(out)
}

#[pyfunction]
fn slln_schedule<'py>(
    py: Python<'py>,
    n: usize,
    theta: f64,
    alpha: f64,
    sigma2: f64,
    c: f64,
) -> PyResult<Bound<'py, PyDict>> {
    schedule_dict(py, &bounds::slln_schedule(n, theta, alpha, sigma2, c).map_err(err)?)
}

#[pyfunction]
fn unbounded_schedule<'py>(
    py: Python<'py>,
    n: usize,
    theta: f64,
    alpha: f64,
    sigma2: f64,
    tau: f64,
    u: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let cond = LaplaceCondition::new(tau, u).map_err(err)?;
    schedule_dict(py, &bounds::unbounded_schedule(n, theta, alpha, sigma2, &cond).map_err(err)?)
}

fn report_dicts<'py>(py: Python<'py>, reports: &[VerificationReport]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("check", &r.check)?;
            d.set_item("param", &r.param)?;
            d.set_item("estimate", r.estimate)?;
            d.set_item("se", r.se)?;
            d.set_item("bound", r.bound)?;
            d.set_item("valid", r.valid)?;
            d.set_item("verdict", r.verdict.as_str())?;
            d.set_item("seed", r.seed)?;
            d.set_item("replicates", r.replicates)?;
            Ok(d)
        })
        .collect()
}

fn config(replicates: usize, seed: u64) -> PyResult<MCConfig> {
    MCConfig::new(replicates, seed).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (model, n, theta, d_n, x_grid, replicates = 10_000, seed = 0))]
fn check_tail_domination<'py>(
    py: Python<'py>,
    model: &PyModel,
    n: usize,
    theta: f64,
    d_n: f64,
    x_grid: Vec<f64>,
    replicates: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let scheme = BlockScheme::with_theta(n, theta).map_err(err)?;
    let cfg = config(replicates, seed)?;
    let rows = py
        .detach(|| verify::check_tail_domination(&model.inner, &scheme, d_n, &x_grid, &cfg))
        .map_err(err)?;
    report_dicts(py, &rows)
}

#[pyfunction]
#[pyo3(signature = (model, n, t_grid, replicates = 10_000, seed = 0))]
fn check_newman<'py>(
    py: Python<'py>,
    model: &PyModel,
    n: usize,
    t_grid: Vec<f64>,
    replicates: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config(replicates, seed)?;
    let rows = py
        .detach(|| verify::check_newman(&model.inner, n, &t_grid, &cfg))
        .map_err(err)?;
    report_dicts(py, &rows)
}

/// `(ks, threshold)` for `S_n/√n` against `N(0, σ²)`.
#[pyfunction]
#[pyo3(signature = (model, n, sigma2 = None, replicates = 10_000, seed = 0))]
fn clt_ks_distance(model: &PyModel, py: Python<'_>, n: usize, sigma2: Option<f64>, replicates: usize, seed: u64) -> PyResult<(f64, f64)> {
    let cfg = config(replicates, seed)?;
    let res = py
        .detach(|| verify::clt_ks_distance(&model.inner, n, sigma2, &cfg))
        .map_err(err)?;
    Ok((res.ks, res.threshold))
}

/// `(slope, slope_se)` of the log quantile of `|S_n/n|` against `log n`.
#[pyfunction]
#[pyo3(signature = (model, n_grid, quantile = 0.99, replicates = 10_000, seed = 0))]
fn slln_rate_fit(
    model: &PyModel,
    py: Python<'_>,
    n_grid: Vec<usize>,
    quantile: f64,
    replicates: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let cfg = config(replicates, seed)?;
    let fit = py
        .detach(|| verify::slln_rate_fit(&model.inner, &n_grid, quantile, &cfg))
        .map_err(err)?;
    Ok((fit.slope, fit.slope_se))
}

/// Values of `ζ_n` on `grid` for one seeded path.
#[pyfunction]
fn empirical_process_path(model: &PyModel, n: usize, grid: Vec<f64>, seed: u64) -> PyResult<Vec<f64>> {
    Ok(verify::empirical_process_path(&model.inner, n, &grid, seed).map_err(err)?.values)
}

/// `(estimate, se)` of `Γ(s, t)`.
#[pyfunction]
#[pyo3(signature = (model, s, t, k = None, replicates = 10_000, seed = 0))]
fn estimate_gamma_operator(
    model: &PyModel,
    py: Python<'_>,
    s: f64,
    t: f64,
    k: Option<usize>,
    replicates: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let cfg = config(replicates, seed)?;
    let est = py
        .detach(|| verify::estimate_gamma_operator(&model.inner, s, t, k, &cfg))
        .map_err(err)?;
    Ok((est.value, est.se))
}

#[pymodule]
fn lweak(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(block_length, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(slln_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(unbounded_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(check_tail_domination, m)?)?;
    m.add_function(wrap_pyfunction!(check_newman, m)?)?;
    m.add_function(wrap_pyfunction!(clt_ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(slln_rate_fit, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_process_path, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_gamma_operator, m)?)?;
    Ok(())
}
