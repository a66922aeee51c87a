//! Python bindings. Build with `maturin develop` from `crates/python`, or copy
//! the compiled library next to a script as `mcsv.so`.

use mcsv::generators::{generate_instance, GenSpec, Series, DEFAULT_SEED};
use mcsv::modelgen::parse_solver_solution;
use mcsv::quantize::QuantizationSpec;
use mcsv::reductions::{certify, X3cInstance};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: mcsv::Error) -> PyErr {
    match e {
        mcsv::Error::ResourceExhausted { .. } | mcsv::Error::Timeout { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_alpha(alpha: &str) -> PyResult<mcsv::Alpha> {
    alpha.parse().map_err(err)
}

/// Integer vectors with a bound `alpha`, given as `"a/b"` or a decimal.
#[pyclass(name = "Instance", frozen, module = "mcsv", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance(mcsv::Instance);

#[pymethods]
impl PyInstance {
    #[new]
    fn new(vectors: Vec<Vec<i64>>, alpha: &str) -> PyResult<Self> {
        Ok(Self(mcsv::Instance::new(vectors, parse_alpha(alpha)?, "").map_err(err)?))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self(mcsv::parse_instance(text).map_err(err)?))
    }

    fn to_text(&self) -> String {
        mcsv::write_instance(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn alpha(&self) -> String {
        self.0.alpha().to_string()
    }

    #[getter]
    fn vectors(&self) -> Vec<Vec<i64>> {
        self.0.vectors().map(<[i64]>::to_vec).collect()
    }

    /// `(numerator, denominator)` of `alpha ||sum Y||^2 / N`.
    fn threshold(&self) -> (i128, i128) {
        let t = self.0.threshold();
        (t.numerator, t.denominator)
    }

    fn is_feasible(&self, indices: Vec<usize>) -> PyResult<bool> {
        mcsv::is_feasible(&self.0, &indices).map_err(err)
    }

    /// Residual of the spread identity as a string; `"0"` when it holds.
    fn spread_identity(&self, indices: Vec<usize>) -> PyResult<String> {
        Ok(mcsv::spread_identity_check(&self.0, &indices).map_err(err)?.to_string())
    }

    fn scaled(&self, factor: i64) -> PyResult<Self> {
        Ok(Self(self.0.scaled(factor).map_err(err)?))
    }

    fn with_alpha(&self, alpha: &str) -> PyResult<Self> {
        Ok(Self(self.0.with_alpha(parse_alpha(alpha)?).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("Instance(N={}, q={}, alpha={})", self.0.len(), self.0.dim(), self.0.alpha())
    }
}

fn outcome<'py>(py: Python<'py>, out: &mcsv::SolveOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("feasible", out.is_feasible())?;
    d.set_item("cardinality", out.cardinality())?;
    if let Some(s) = out.solution() {
        d.set_item("indices", s.indices().to_vec())?;
        d.set_item("sum", s.sum().to_vec())?;
    }
    Ok(d)
}

/// Exact solve. Returns a dict with `feasible`, `cardinality`, `indices`,
/// `sum`, `peak_states` and `layer_sizes`.
#[pyfunction]
#[pyo3(signature = (inst, max_states=None, backend=None))]
fn dp_solve<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    max_states: Option<u64>,
    backend: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut opts = mcsv::DpOptions::default();
    if let Some(m) = max_states {
        opts.max_states = m;
    }
    opts.backend = match backend {
        None | Some("auto") => mcsv::Backend::Auto,
        Some("dense") => mcsv::Backend::Dense,
        Some("sparse") => mcsv::Backend::Sparse,
        Some(b) => return Err(PyValueError::new_err(format!("unknown backend `{b}`"))),
    };
    let inner = inst.0.clone();
    let (out, stats) = py.detach(move || mcsv::dp_solve_with(&inner, &opts)).map_err(err)?;
    let d = outcome(py, &out)?;
    d.set_item("peak_states", stats.peak_states)?;
    d.set_item("layer_sizes", stats.layer_sizes)?;
    Ok(d)
}

#[pyfunction]
fn brute_solve<'py>(py: Python<'py>, inst: &PyInstance) -> PyResult<Bound<'py, PyDict>> {
    outcome(py, &mcsv::brute_solve(&inst.0).map_err(err)?)
}

/// Reduces an exact-cover-by-3-sets instance (1-based elements). Returns the
/// instance and whether an exact cover exists.
#[pyfunction]
fn reduce_x3c(p: usize, subsets: Vec<[usize; 3]>) -> PyResult<(PyInstance, bool)> {
    let cert = certify(&X3cInstance::new(p, subsets).map_err(err)?).map_err(err)?;
    Ok((PyInstance(cert.mcsv), cert.truth))
}

#[pyfunction]
fn emit_model(inst: &PyInstance) -> String {
    mcsv::modelgen::emit_model(&inst.0).text
}

#[pyfunction]
fn check_solution<'py>(py: Python<'py>, inst: &PyInstance, text: &str) -> PyResult<Bound<'py, PyDict>> {
    outcome(py, &parse_solver_solution(text, &inst.0).map_err(err)?)
}

/// Seeded instance of a benchmark series; real-valued series are quantized
/// at `scale`.
#[pyfunction]
#[pyo3(signature = (series, seed=DEFAULT_SEED, n=None, q=None, alpha=None, scale=100))]
fn generate(
    series: &str,
    seed: u64,
    n: Option<usize>,
    q: Option<usize>,
    alpha: Option<&str>,
    scale: u64,
) -> PyResult<PyInstance> {
    let mut spec = GenSpec::new(series.parse::<Series>().map_err(err)?, seed);
    if let Some(n) = n {
        spec.n = n;
    }
    if let Some(q) = q {
        spec.q = q;
    }
    if let Some(a) = alpha {
        spec.alpha = parse_alpha(a)?;
    }
    let quant = QuantizationSpec::new(scale).map_err(err)?;
    Ok(PyInstance(generate_instance(&spec, quant).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (vectors, alpha, scale=100))]
fn quantize(vectors: Vec<Vec<f64>>, alpha: &str, scale: u64) -> PyResult<PyInstance> {
    let spec = QuantizationSpec::new(scale).map_err(err)?;
    Ok(PyInstance(
        mcsv::quantize::quantize(&vectors, parse_alpha(alpha)?, spec).map_err(err)?,
    ))
}

#[pymodule]
#[pyo3(name = "mcsv")]
fn mcsv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(dp_solve, m)?)?;
    m.add_function(wrap_pyfunction!(brute_solve, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_x3c, m)?)?;
    m.add_function(wrap_pyfunction!(emit_model, m)?)?;
    m.add_function(wrap_pyfunction!(check_solution, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    Ok(())
}
