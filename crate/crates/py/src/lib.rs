//! Python bindings for `fracorder`.

use fracorder::analysis;
use fracorder::norms::{self, NormOptions};
use fracorder::operators::{self, DEFAULT_NODES};
use fracorder::specfun;
use fracorder::{
    Error, ErrorReport as CoreReport, FractionalOrder, Interval, NormKind, OperatorKind,
    QuadratureScheme, TestFunction as CoreFunction,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    fracorder_py,
    NumericalError,
    PyRuntimeError,
    "Quadrature, root finding or fitting failed."
);

fn to_py(e: Error) -> PyErr {
    let inner = match &e {
        Error::Sweep { source, .. } => source.as_ref(),
        other => other,
    };
    match inner {
        Error::Domain(_) | Error::NonDifferentiable { .. } => PyValueError::new_err(e.to_string()),
        _ => NumericalError::new_err(e.to_string()),
    }
}

fn kind(s: &str) -> PyResult<OperatorKind> {
    s.parse().map_err(to_py)
}

fn norm(s: &str) -> PyResult<NormKind> {
    s.parse().map_err(to_py)
}

fn interval(a: f64, b: f64) -> PyResult<Interval> {
    Interval::new(a, b).map_err(to_py)
}

fn scheme(n_nodes: usize) -> PyResult<QuadratureScheme> {
    QuadratureScheme::product_trapezoid(n_nodes).map_err(to_py)
}

/// A catalog test function, built from an id such as `power:2`, `exp`,
/// `cos`, `affine:1,1`, `abs:1` or `step:0.2,0.5,1;0.6,0.8,-2`.
#[pyclass(frozen, name = "TestFunction", module = "fracorder_py")]
struct PyTestFunction {
    inner: CoreFunction,
}

#[pymethods]
impl PyTestFunction {
    #[new]
    fn new(id: &str) -> PyResult<Self> {
        Ok(Self {
            inner: id.parse().map_err(to_py)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (exponent, origin = 0.0))]
    fn power(exponent: f64, origin: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CoreFunction::power(exponent, origin).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn affine(slope: f64, intercept: f64) -> Self {
        Self {
            inner: CoreFunction::affine(slope, intercept),
        }
    }

    #[staticmethod]
    fn exponential() -> Self {
        Self {
            inner: CoreFunction::Exponential,
        }
    }

    #[staticmethod]
    fn cosine() -> Self {
        Self {
            inner: CoreFunction::Cosine,
        }
    }

    #[staticmethod]
    fn abs_shift(center: f64) -> Self {
        Self {
            inner: CoreFunction::abs_shift(center),
        }
    }

    #[staticmethod]
    fn step(breaks: Vec<(f64, f64)>, heights: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CoreFunction::step(&breaks, &heights).map_err(to_py)?,
        })
    }

    fn __call__(&self, t: f64) -> PyResult<f64> {
        self.inner.eval(t).map_err(to_py)
    }

    fn derivative(&self, t: f64) -> PyResult<f64> {
        self.inner.eval_derivative(t).map_err(to_py)
    }

    fn kinks(&self) -> Vec<f64> {
        self.inner.kinks()
    }

    fn __repr__(&self) -> String {
        format!("TestFunction('{}')", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(frozen, name = "ErrorReport", module = "fracorder_py")]
struct PyErrorReport {
    inner: CoreReport,
}

#[pymethods]
impl PyErrorReport {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.operator_kind.label()
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn p(&self) -> &'static str {
        self.inner.p.label()
    }
    #[getter]
    fn interval(&self) -> (f64, f64) {
        (self.inner.interval.a(), self.inner.interval.b())
    }
    #[getter]
    fn value(&self) -> f64 {
        self.inner.value
    }
    #[getter]
    fn error_estimate(&self) -> f64 {
        self.inner.error_estimate
    }
    #[getter]
    fn n_eval_points(&self) -> usize {
        self.inner.n_eval_points
    }

    fn __repr__(&self) -> String {
        format!(
            "ErrorReport(kind='{}', beta={}, p='{}', value={:?})",
            self.kind(),
            self.inner.beta,
            self.p(),
            self.inner.value
        )
    }
}

#[pyclass(frozen, get_all, name = "OrderFit", module = "fracorder_py")]
struct PyOrderFit {
    r_hat: f64,
    log_c_hat: f64,
    residual: f64,
    n_points: usize,
}

#[pymethods]
impl PyOrderFit {
    fn __repr__(&self) -> String {
        format!(
            "OrderFit(r_hat={:?}, log_c_hat={:?}, residual={:?}, n_points={})",
            self.r_hat, self.log_c_hat, self.residual, self.n_points
        )
    }
}

/// Fractional derivative of order `alpha` (`kind` is "RL", "C" or "CF").
#[pyfunction]
#[pyo3(signature = (f, kind, alpha, a, t, n_nodes = DEFAULT_NODES))]
fn fractional_derivative(
    py: Python<'_>,
    f: &PyTestFunction,
    kind: &str,
    alpha: f64,
    a: f64,
    t: f64,
    n_nodes: usize,
) -> PyResult<f64> {
    let kind = self::kind(kind)?;
    let order = FractionalOrder::new(alpha).map_err(to_py)?;
    let s = scheme(n_nodes)?;
    let f = f.inner.clone();
    py.detach(|| operators::fractional_derivative(&f, kind, order, a, t, s))
        .map_err(to_py)
}

/// Riemann-Liouville integral of order `alpha`.
#[pyfunction]
#[pyo3(signature = (f, alpha, a, t, n_nodes = DEFAULT_NODES))]
fn rl_integral(
    py: Python<'_>,
    f: &PyTestFunction,
    alpha: f64,
    a: f64,
    t: f64,
    n_nodes: usize,
) -> PyResult<f64> {
    let order = FractionalOrder::new(alpha).map_err(to_py)?;
    let s = scheme(n_nodes)?;
    let f = f.inner.clone();
    py.detach(|| operators::rl_integral(&f, order, a, t, s))
        .map_err(to_py)
}

/// `‖D^{1−β} f − f'‖_p` on `(a, b)`; `p` is "1" or "inf".
#[pyfunction]
#[pyo3(signature = (f, kind, p, beta, a, b, tol = norms::DEFAULT_TOL, n_grid = norms::DEFAULT_GRID, n_nodes = DEFAULT_NODES))]
#[allow(clippy::too_many_arguments)]
fn error_norm(
    py: Python<'_>,
    f: &PyTestFunction,
    kind: &str,
    p: &str,
    beta: f64,
    a: f64,
    b: f64,
    tol: f64,
    n_grid: usize,
    n_nodes: usize,
) -> PyResult<PyErrorReport> {
    let (kind, p, iv) = (self::kind(kind)?, norm(p)?, interval(a, b)?);
    let opts = NormOptions {
        tol,
        n_grid,
        scheme: scheme(n_nodes)?,
    };
    let f = f.inner.clone();
    let inner = py
        .detach(|| norms::error_norm(&f, kind, p, beta, iv, &opts))
        .map_err(to_py)?;
    Ok(PyErrorReport { inner })
}

/// One report per β (strictly decreasing), computed in parallel.
#[pyfunction]
#[pyo3(signature = (f, kind, p, betas, a, b, tol = norms::DEFAULT_TOL, n_grid = norms::DEFAULT_GRID, n_nodes = DEFAULT_NODES))]
#[allow(clippy::too_many_arguments)]
fn error_sweep(
    py: Python<'_>,
    f: &PyTestFunction,
    kind: &str,
    p: &str,
    betas: Vec<f64>,
    a: f64,
    b: f64,
    tol: f64,
    n_grid: usize,
    n_nodes: usize,
) -> PyResult<Vec<PyErrorReport>> {
    let (kind, p, iv) = (self::kind(kind)?, norm(p)?, interval(a, b)?);
    let opts = NormOptions {
        tol,
        n_grid,
        scheme: scheme(n_nodes)?,
    };
    let f = f.inner.clone();
    let reports = py
        .detach(|| norms::error_sweep_with(&f, kind, p, &betas, iv, &opts))
        .map_err(to_py)?;
    Ok(reports
        .into_iter()
        .map(|inner| PyErrorReport { inner })
        .collect())
}

/// Log-log order fit of a β sweep.
#[pyfunction]
fn fit_order(reports: Vec<PyRef<'_, PyErrorReport>>) -> PyResult<PyOrderFit> {
    let reports: Vec<CoreReport> = reports.iter().map(|r| r.inner).collect();
    let fit = analysis::fit_order(&reports).map_err(to_py)?;
    Ok(PyOrderFit {
        r_hat: fit.r_hat,
        log_c_hat: fit.log_c_hat,
        residual: fit.residual,
        n_points: fit.n_points,
    })
}

#[pyfunction]
#[pyo3(signature = (start, end, per_decade = analysis::DEFAULT_PER_DECADE))]
fn geometric_betas(start: f64, end: f64, per_decade: usize) -> PyResult<Vec<f64>> {
    analysis::geometric_betas(start, end, per_decade).map_err(to_py)
}

/// Caputo-Fabrizio over Caputo L¹ error ratio for `t^m` on `(0, T)`.
#[pyfunction]
#[pyo3(signature = (m, t, beta = None))]
fn ratio(m: u32, t: f64, beta: Option<f64>) -> PyResult<f64> {
    match beta {
        Some(beta) => analysis::ratio_cf_over_c_l1(m, t, beta),
        None => analysis::ratio_limit(m, t),
    }
    .map(|r| r.value)
    .map_err(to_py)
}

/// Rows `(m, ratio at T=1, ratio at T=m−1)` for m = 3..6.
#[pyfunction]
fn table1() -> Vec<(u32, f64, f64)> {
    analysis::table1()
        .into_iter()
        .map(|r| (r.m, r.ratio_t1, r.ratio_tm1))
        .collect()
}

#[pyfunction]
fn t_star(m: u32, beta: f64) -> PyResult<f64> {
    analysis::t_star(m, beta).map_err(to_py)
}

#[pyfunction]
fn s_star(m: u32, beta: f64) -> PyResult<f64> {
    analysis::s_star(m, beta).map_err(to_py)
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    specfun::gamma(x).map_err(to_py)
}

#[pyfunction]
fn ln_gamma(x: f64) -> PyResult<f64> {
    specfun::ln_gamma(x).map_err(to_py)
}

#[pyfunction]
fn digamma(x: f64) -> PyResult<f64> {
    specfun::digamma(x).map_err(to_py)
}

/// `E_{1,ω}(z)`.
#[pyfunction]
fn mittag_leffler_one(omega: f64, z: f64) -> PyResult<f64> {
    specfun::mittag_leffler_one(omega, z).map_err(to_py)
}

#[pymodule]
fn fracorder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyTestFunction>()?;
    m.add_class::<PyErrorReport>()?;
    m.add_class::<PyOrderFit>()?;
    m.add_function(wrap_pyfunction!(fractional_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(rl_integral, m)?)?;
    m.add_function(wrap_pyfunction!(error_norm, m)?)?;
    m.add_function(wrap_pyfunction!(error_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(fit_order, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_betas, m)?)?;
    m.add_function(wrap_pyfunction!(ratio, m)?)?;
    m.add_function(wrap_pyfunction!(table1, m)?)?;
    m.add_function(wrap_pyfunction!(t_star, m)?)?;
    m.add_function(wrap_pyfunction!(s_star, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(ln_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(digamma, m)?)?;
    m.add_function(wrap_pyfunction!(mittag_leffler_one, m)?)?;
    Ok(())
}
