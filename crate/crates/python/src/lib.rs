//! Python bindings: `import driftlab`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use driftlab_core::drift::{self, TestResult};
use driftlab_core::dynamics::{self, DdeSpec, Drift, History};
use driftlab_core::eda::{correlation_matrix_complete, CorrelationMatrix};
use driftlab_core::factor::{self, FactorModel};
use driftlab_core::ingest::{self, Frame};
use driftlab_core::numcore::{Matrix, RandomSeed};
use driftlab_core::possibility::{self, PossibilityDistribution};
use driftlab_core::regress::{self, RegressionSummary};

fn err(e: driftlab_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(columns: &[Vec<f64>]) -> PyResult<Matrix> {
    Matrix::from_columns(columns).map_err(err)
}

#[pyclass(name = "TestResult", frozen)]
struct PyTestResult(TestResult);

#[pymethods]
impl PyTestResult {
    #[getter]
    fn method(&self) -> String {
        self.0.method.clone()
    }
    #[getter]
    fn statistic(&self) -> f64 {
        self.0.statistic
    }
    #[getter]
    fn df(&self) -> Vec<f64> {
        self.0.df.clone()
    }
    #[getter]
    fn p_value(&self) -> f64 {
        self.0.p_value
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }
    #[getter]
    fn reject(&self) -> bool {
        self.0.reject
    }
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }
    #[getter]
    fn note(&self) -> Option<String> {
        self.0.note.clone()
    }
    fn __repr__(&self) -> String {
        format!("TestResult(method={:?}, statistic={}, p_value={}, reject={})", self.0.method, self.0.statistic, self.0.p_value, self.0.reject)
    }
}

/// A possibility distribution over labelled outcomes.
#[pyclass(name = "PossibilityDistribution", frozen)]
struct PyPossibility(PossibilityDistribution);

#[pymethods]
impl PyPossibility {
    #[new]
    fn new(degrees: BTreeMap<String, f64>) -> PyResult<Self> {
        PossibilityDistribution::new(degrees).map(PyPossibility).map_err(err)
    }

    #[staticmethod]
    fn from_probabilities(p: Vec<f64>) -> PyResult<Self> {
        possibility::prob_to_poss(&p).map(PyPossibility).map_err(err)
    }

    fn domain(&self) -> Vec<String> {
        self.0.domain().to_vec()
    }

    fn degrees(&self) -> Vec<f64> {
        self.0.degrees().to_vec()
    }

    fn possibility(&self, event: Vec<String>) -> PyResult<f64> {
        self.0.possibility(event.iter().map(String::as_str)).map_err(err)
    }

    fn necessity(&self, event: Vec<String>) -> PyResult<f64> {
        self.0.necessity(event.iter().map(String::as_str)).map_err(err)
    }

    fn nonspecificity(&self) -> PyResult<f64> {
        possibility::nonspecificity(&self.0).map_err(err)
    }
}

#[pyclass(name = "Frame", frozen)]
struct PyFrame(Frame);

#[pymethods]
impl PyFrame {
    #[getter]
    fn n_rows(&self) -> usize {
        self.0.n_rows()
    }

    fn columns(&self) -> Vec<String> {
        self.0.column_names().iter().map(|s| s.to_string()).collect()
    }

    /// Numeric column with missing cells as `None`.
    fn numeric(&self, name: &str) -> PyResult<Vec<Option<f64>>> {
        self.0.numeric(name).map_err(err)
    }

    fn missing_count(&self, name: &str) -> PyResult<usize> {
        self.0.missing_count(name).map_err(err)
    }

    fn validation_report(&self) -> String {
        ingest::validation_report(&self.0)
    }

    /// Complete-case correlation matrix as nested lists.
    fn correlation(&self, columns: Vec<String>) -> PyResult<Vec<Vec<f64>>> {
        let c = correlation_matrix_complete(&self.0, &columns).map_err(err)?;
        Ok(corr_rows(&c))
    }

    /// Maximum-likelihood factor fit on the complete-case correlations.
    #[pyo3(signature = (columns, factors=None))]
    fn factor_analysis(&self, columns: Vec<String>, factors: Option<usize>) -> PyResult<PyFactorModel> {
        let c = correlation_matrix_complete(&self.0, &columns).map_err(err)?;
        let k = match factors {
            Some(k) => k,
            None => factor::kaiser_count(&c).map_err(err)?,
        };
        factor::efa_fit(&c, k).map(PyFactorModel).map_err(err)
    }
}

fn corr_rows(c: &CorrelationMatrix) -> Vec<Vec<f64>> {
    (0..c.order()).map(|i| (0..c.order()).map(|j| c.get(i, j)).collect()).collect()
}

#[pyclass(name = "FactorModel", frozen)]
struct PyFactorModel(FactorModel);

#[pymethods]
impl PyFactorModel {
    #[getter]
    fn variables(&self) -> Vec<String> {
        self.0.variables.clone()
    }
    #[getter]
    fn uniquenesses(&self) -> Vec<f64> {
        self.0.uniquenesses.clone()
    }
    #[getter]
    fn loadings(&self) -> Vec<Vec<f64>> {
        self.0.loadings.to_rows()
    }
    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }
    fn communalities(&self) -> Vec<f64> {
        self.0.communalities()
    }
    /// Cumulative proportion of variance after each factor.
    fn cumulative_variance(&self) -> Vec<f64> {
        factor::variance_table(&self.0).iter().map(|v| v.cumulative).collect()
    }
}

#[pyclass(name = "RegressionSummary", frozen)]
struct PyRegression(RegressionSummary);

#[pymethods]
impl PyRegression {
    /// `{term: (estimate, std_error, t_value, p_value)}`
    fn coefficients(&self) -> BTreeMap<String, (f64, f64, f64, f64)> {
        self.0.coefficients.iter().map(|c| (c.name.clone(), (c.estimate, c.std_error, c.t_value, c.p_value))).collect()
    }
    #[getter]
    fn r_squared(&self) -> f64 {
        self.0.r_squared
    }
    #[getter]
    fn adj_r_squared(&self) -> f64 {
        self.0.adj_r_squared
    }
    #[getter]
    fn f_statistic(&self) -> f64 {
        self.0.f_statistic
    }
    #[getter]
    fn f_p_value(&self) -> f64 {
        self.0.f_p_value
    }
    #[getter]
    fn residual_se(&self) -> f64 {
        self.0.residual_se
    }
    #[getter]
    fn df_residual(&self) -> usize {
        self.0.df_residual
    }
    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.0.residuals.clone()
    }
    fn durbin_watson(&self) -> PyResult<f64> {
        regress::durbin_watson(&self.0.residuals).map_err(err)
    }
    fn __str__(&self) -> String {
        self.0.to_text()
    }
}

#[pyfunction]
fn load_csv(path: PathBuf) -> PyResult<PyFrame> {
    ingest::load_path(&path).map(PyFrame).map_err(err)
}

/// Least squares of `y` on the named regressors.
#[pyfunction]
#[pyo3(signature = (y, terms, intercept=true, response="y"))]
fn ols(y: Vec<f64>, terms: Vec<(String, Vec<f64>)>, intercept: bool, response: &str) -> PyResult<PyRegression> {
    regress::ols_fit(response, &y, &terms, intercept).map(PyRegression).map_err(err)
}

/// Mean-trend test over time-labelled rows (`columns` are variables).
#[pyfunction]
fn mean_trend(columns: Vec<Vec<f64>>, times: Vec<f64>) -> PyResult<PyTestResult> {
    let data = matrix(&columns)?;
    let windows = drift::expanding_windows_by_time(&data, &times, 1).map_err(err)?;
    drift::h1b_mean_trend(&windows).map(PyTestResult).map_err(err)
}

#[pyfunction]
fn covariance_stability(columns: Vec<Vec<f64>>, splits: usize) -> PyResult<PyTestResult> {
    drift::h1a_cov_stability(&matrix(&columns)?, splits).map(PyTestResult).map_err(err)
}

#[pyfunction]
fn hotelling(columns: Vec<Vec<f64>>, mu0: Vec<f64>) -> PyResult<PyTestResult> {
    drift::hotelling_t2(&matrix(&columns)?, &mu0).map(PyTestResult).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, min_rows=20))]
fn correlation_shift(x: Vec<f64>, y: Vec<f64>, min_rows: usize) -> PyResult<PyTestResult> {
    drift::h2a_corr_shift(&matrix(&[x, y])?, min_rows).map(PyTestResult).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, min_rows=20))]
fn mi_shift(x: Vec<f64>, y: Vec<f64>, min_rows: usize) -> PyResult<PyTestResult> {
    drift::h2b_mi_shift(&matrix(&[x, y])?, min_rows).map(PyTestResult).map_err(err)
}

#[pyfunction]
fn signed_rank(xs: Vec<f64>, mu: f64) -> PyResult<PyTestResult> {
    drift::wilcoxon_signed_rank(&xs, mu).map(PyTestResult).map_err(err)
}

#[pyfunction]
fn mutual_information(x: Vec<f64>, y: Vec<f64>, bins: usize) -> PyResult<f64> {
    drift::mutual_information(&x, &y, bins).map_err(err)
}

#[pyfunction]
fn possibilistic_drift(xs: Vec<f64>, windows: usize, bins: usize) -> PyResult<Vec<f64>> {
    drift::possibilistic_drift(&xs, windows, bins).map_err(err)
}

/// `(time, values)` for the decay panel at `n_times` times.
#[pyfunction]
fn decay_panel(n_times: usize, n_obs: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let p = drift::simulate_decay_panel(n_times, n_obs, RandomSeed(seed)).map_err(err)?;
    Ok((p.time, p.data.column(0)))
}

/// RK4 solution of `y' = −rate·y` as `(times, values)`.
#[pyfunction]
fn decay_ode(y0: f64, rate: f64, dt: f64, t_end: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let tr = dynamics::decay_ode(y0, rate, dt, t_end).map_err(err)?;
    let u = tr.component(0);
    Ok((tr.times, u))
}

/// Delayed-feedback or decay path with constant history, `(times, values)`.
#[pyfunction]
#[pyo3(signature = (drift="feedback", rate=1.0, delay=1.0, sigma=0.0, history=1.0, dt=0.01, horizon=20.0, seed=42))]
#[allow(clippy::too_many_arguments)]
fn dde(drift: &str, rate: f64, delay: f64, sigma: f64, history: f64, dt: f64, horizon: f64, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let drift = match drift {
        "decay" => Drift::Decay { rate },
        "feedback" => Drift::DelayedFeedback { gain: rate },
        "logistic" => Drift::Logistic { rate, capacity: 1.0 },
        other => return Err(PyValueError::new_err(format!("unknown drift {other:?}"))),
    };
    let spec = DdeSpec { drift, delay, sigma, history: History::Constant(history), horizon, dt, seed: RandomSeed(seed) };
    let tr = dynamics::dde_simulate(&spec).map_err(err)?;
    let u = tr.component(0);
    Ok((tr.times, u))
}

#[pymodule]
fn driftlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTestResult>()?;
    m.add_class::<PyPossibility>()?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PyFactorModel>()?;
    m.add_class::<PyRegression>()?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    m.add_function(wrap_pyfunction!(ols, m)?)?;
    m.add_function(wrap_pyfunction!(mean_trend, m)?)?;
    m.add_function(wrap_pyfunction!(covariance_stability, m)?)?;
    m.add_function(wrap_pyfunction!(hotelling, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_shift, m)?)?;
    m.add_function(wrap_pyfunction!(mi_shift, m)?)?;
    m.add_function(wrap_pyfunction!(signed_rank, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(possibilistic_drift, m)?)?;
    m.add_function(wrap_pyfunction!(decay_panel, m)?)?;
    m.add_function(wrap_pyfunction!(decay_ode, m)?)?;
    m.add_function(wrap_pyfunction!(dde, m)?)?;
    Ok(())
}
