//! Python bindings. Series cross the boundary as lists of floats, and
//! structured results come back as plain dicts.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mfxwl::pipeline::{analyze_pair, AnalysisConfig};
use mfxwl::report::summary_json;
use mfxwl::signal_io::Signal;
use mfxwl::synth::{self, BfbmSpec, CascadeSpec};
use mfxwl::validate::{run_validation, ValidationOptions};
use mfxwl::Error;

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Io { .. } | Error::Parse { .. } | Error::EmptyColumn { .. } | Error::Format { .. } => {
            PyOSError::new_err(msg)
        }
        Error::Numerical(_) => PyArithmeticError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn signal(name: &str, values: Vec<f64>) -> PyResult<Signal> {
    Signal::raw(name, values).map_err(py_err)
}

/// Deterministic binomial cascade with weight `p` after `iterations` steps.
#[pyfunction]
fn binomial_measure(p: f64, iterations: u32) -> PyResult<Vec<f64>> {
    let spec = CascadeSpec::new(p, iterations).map_err(py_err)?;
    Ok(synth::binomial_measure(&spec).into_values())
}

/// Bivariate fBm paths `(x, y)`, or their increments when `increments` is set.
#[pyfunction]
#[pyo3(signature = (hurst_x, hurst_y, rho, n, seed = 0, increments = false))]
fn bfbm(
    hurst_x: f64,
    hurst_y: f64,
    rho: f64,
    n: usize,
    seed: u64,
    increments: bool,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let spec = BfbmSpec::new(hurst_x, hurst_y, rho, n, seed).map_err(py_err)?;
    if increments {
        let g = synth::bfgn(&spec).map_err(py_err)?;
        return Ok((g.x, g.y));
    }
    let (x, y) = synth::bfbm(&spec).map_err(py_err)?.into_parts();
    Ok((x.into_values(), y.into_values()))
}

#[pyfunction]
fn coherence(hurst_x: f64, hurst_y: f64, rho: f64) -> f64 {
    synth::coherence(hurst_x, hurst_y, rho)
}

#[pyfunction]
fn rho_bound(hurst_x: f64, hurst_y: f64) -> f64 {
    synth::rho_bound(hurst_x, hurst_y)
}

#[pyfunction]
fn analytic_zeta_single(p_z: f64, q: f64) -> f64 {
    synth::analytic_zeta_single(p_z, q)
}

#[pyfunction]
fn analytic_zeta_cross(p_x: f64, p_y: f64, p: f64, q: f64) -> f64 {
    synth::analytic_zeta_cross(p_x, p_y, p, q)
}

/// `(h_x, h_y, D)` of the cascade pair at orders `(p, q)`.
#[pyfunction]
fn analytic_cross_spectrum(p_x: f64, p_y: f64, p: f64, q: f64) -> (f64, f64, f64) {
    let s = synth::analytic_cross_spectrum(p_x, p_y, p, q);
    (s.h_x, s.h_y, s.d)
}

#[pyfunction]
fn pearson_correlation(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    synth::pearson_correlation(&signal("x", x)?, &signal("y", y)?).map_err(py_err)
}

/// Analyze a pair of series. Keyword arguments override fields of the
/// analysis configuration, e.g. `step=1.0` or `fit_range={"lo": 3, "hi": 10}`.
/// Returns the same summary that the command line writes to summary.json.
#[pyfunction]
#[pyo3(signature = (x, y, **config))]
fn analyze<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    y: Vec<f64>,
    config: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg: AnalysisConfig = match config {
        Some(kw) => {
            let text: String = py.import("json")?.call_method1("dumps", (kw,))?.extract()?;
            serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("invalid configuration: {e}")))?
        }
        None => AnalysisConfig::default(),
    };
    let (x, y) = (signal("x", x)?, signal("y", y)?);
    let report = py.detach(|| analyze_pair(&x, &y, &cfg)).map_err(py_err)?;
    json_loads(py, &summary_json(&report))
}

/// Run the benchmark checks. Returns `(passed, report)` with the report as a dict.
#[pyfunction]
#[pyo3(signature = (realizations = 10, seed = None))]
fn validate<'py>(py: Python<'py>, realizations: usize, seed: Option<u64>) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let defaults = ValidationOptions::default();
    let opts = ValidationOptions {
        bfbm_realizations: realizations,
        seed: seed.unwrap_or(defaults.seed),
        ..defaults
    };
    if realizations == 0 {
        return Err(PyValueError::new_err("at least one realization is needed"));
    }
    let report = py.detach(|| run_validation(&opts)).map_err(py_err)?;
    let text = serde_json::to_string(&report).expect("report serializes");
    Ok((report.passed(), json_loads(py, &text)?))
}

#[pymodule]
#[pyo3(name = "mfxwl")]
fn mfxwl_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(binomial_measure, m)?)?;
    m.add_function(wrap_pyfunction!(bfbm, m)?)?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(rho_bound, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_zeta_single, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_zeta_cross, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_cross_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(pearson_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
