//! Python bindings. Results come back as plain dicts decoded from the JSON
//! form of the Rust result types.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use policysim::patheffects::{BootstrapConfig, MediationModel, ModerationModel, OutcomeKind};
use policysim::pipeline::{AnalysisConfig, PipelineInput};
use policysim::{DataTable, ScenarioSpec};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn kind(binary: bool) -> OutcomeKind {
    if binary {
        OutcomeKind::Binary
    } else {
        OutcomeKind::Continuous
    }
}

/// A scenario: variables, weighted paths, interactions and noise.
#[pyclass(name = "Scenario", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: ScenarioSpec,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn default() -> Self {
        Self { inner: policysim::default_scenario() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        policysim::load_scenario(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Problems found by validation; empty when the scenario is usable.
    fn validate(&self) -> Vec<String> {
        policysim::validate_scenario(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[setter]
    fn set_n(&mut self, n: usize) {
        self.inner.n = n;
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    fn generate(&self) -> PyResult<PyTable> {
        policysim::synth::generate(&self.inner).map(|inner| PyTable { inner }).map_err(err)
    }

    fn quality_gate<'py>(&self, py: Python<'py>, table: &PyTable) -> PyResult<Bound<'py, PyAny>> {
        let report = policysim::synth::quality_gate(&table.inner, &self.inner).map_err(err)?;
        to_py(py, &report)
    }
}

/// A column-oriented data table.
#[pyclass(name = "Table", from_py_object)]
#[derive(Clone)]
struct PyTable {
    inner: DataTable,
}

#[pymethods]
impl PyTable {
    /// Builds a table of numeric columns from a dict of name -> list.
    #[staticmethod]
    fn from_dict(columns: &Bound<'_, PyDict>) -> PyResult<Self> {
        let mut cols = Vec::with_capacity(columns.len());
        for (k, v) in columns.iter() {
            cols.push((k.extract::<String>()?, v.extract::<Vec<f64>>()?));
        }
        DataTable::from_columns(cols).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        DataTable::read_csv(text.as_bytes()).map(|inner| Self { inner }).map_err(err)
    }

    fn to_csv(&self) -> PyResult<String> {
        self.inner.to_csv_string().map_err(err)
    }

    #[getter]
    fn columns(&self) -> Vec<String> {
        self.inner.names().map(str::to_string).collect()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    /// Numeric values of a column; categorical columns give level codes.
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        self.inner.values(name).map(<[f64]>::to_vec).map_err(err)
    }

    fn one_hot(&self) -> PyResult<Self> {
        self.inner.one_hot_all().map(|inner| Self { inner }).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }
}

#[pyfunction]
#[pyo3(signature = (table, y, x, intercept = true))]
fn ols<'py>(py: Python<'py>, table: &PyTable, y: &str, x: Vec<String>, intercept: bool) -> PyResult<Bound<'py, PyAny>> {
    let fit = policysim::ols_fit(&table.inner, y, &x, intercept).map_err(err)?;
    to_py(py, &fit)
}

#[pyfunction]
fn logit<'py>(py: Python<'py>, table: &PyTable, y: &str, x: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let fit = policysim::logit_fit(&table.inner, y, &x).map_err(err)?;
    to_py(py, &fit)
}

#[pyfunction]
fn roc_auc(scores: Vec<f64>, labels: Vec<f64>) -> PyResult<f64> {
    policysim::roc_auc(&scores, &labels).map(|r| r.auc).map_err(err)
}

/// Returns the retained columns and the VIF table with its removal trace.
#[pyfunction]
#[pyo3(signature = (table, columns, threshold = 5.0))]
fn vif_prune<'py>(
    py: Python<'py>,
    table: &PyTable,
    columns: Vec<String>,
    threshold: f64,
) -> PyResult<(Vec<String>, Bound<'py, PyAny>)> {
    let (kept, vif) = policysim::vif_prune(&table.inner, &columns, threshold).map_err(err)?;
    Ok((kept, to_py(py, &vif)?))
}

#[pyfunction]
#[pyo3(signature = (table, x, m, y, controls = Vec::new(), binary = false, resamples = 5000, seed = 42))]
#[allow(clippy::too_many_arguments)]
fn mediation<'py>(
    py: Python<'py>,
    table: &PyTable,
    x: String,
    m: String,
    y: String,
    controls: Vec<String>,
    binary: bool,
    resamples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let model = MediationModel { x, m, y, controls, outcome_kind: kind(binary) };
    let boot = BootstrapConfig { resamples, seed, ..BootstrapConfig::default() };
    let report = policysim::patheffects::mediation(&table.inner, &model, &boot).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (table, x, moderator, y, controls = Vec::new(), binary = false))]
fn moderation<'py>(
    py: Python<'py>,
    table: &PyTable,
    x: String,
    moderator: String,
    y: String,
    controls: Vec<String>,
    binary: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let model = ModerationModel { x, moderator, y, controls, outcome_kind: kind(binary) };
    let report = policysim::moderation(&table.inner, &model).map_err(err)?;
    to_py(py, &report)
}

/// Runs the full pipeline on a scenario or a table and returns the report.
/// `config` is an optional analysis configuration in JSON form.
#[pyfunction]
#[pyo3(signature = (scenario = None, table = None, resamples = None, config = None))]
fn run_pipeline<'py>(
    py: Python<'py>,
    scenario: Option<PyScenario>,
    table: Option<PyTable>,
    resamples: Option<usize>,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let input = match (scenario, table) {
        (Some(s), None) => PipelineInput::Scenario(s.inner),
        (None, Some(t)) => PipelineInput::Table(t.inner),
        (None, None) => PipelineInput::Scenario(policysim::default_scenario()),
        (Some(_), Some(_)) => return Err(PyValueError::new_err("pass a scenario or a table, not both")),
    };
    let mut cfg = match config {
        Some(text) => AnalysisConfig::from_json(text).map_err(err)?,
        None => AnalysisConfig::default(),
    };
    if let Some(b) = resamples {
        cfg.bootstrap.resamples = b;
    }
    let report = py.detach(|| policysim::run_pipeline(input, &cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
#[pyo3(name = "policysim")]
fn policysim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyTable>()?;
    m.add_function(wrap_pyfunction!(ols, m)?)?;
    m.add_function(wrap_pyfunction!(logit, m)?)?;
    m.add_function(wrap_pyfunction!(roc_auc, m)?)?;
    m.add_function(wrap_pyfunction!(vif_prune, m)?)?;
    m.add_function(wrap_pyfunction!(mediation, m)?)?;
    m.add_function(wrap_pyfunction!(moderation, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}
