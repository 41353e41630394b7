//! Python bindings. Results come back as plain dicts and lists mirroring the
//! JSON documents of the command-line tool.

use fusionforge_core::engine::{modular_idempotents, modular_spec, recover_fusion};
use fusionforge_core::modular::{catalog, catalog_entries, verlinde as verlinde_ring};
use fusionforge_core::permutation::{
    cyclic_fusion, parity_check as parity_report, permutation_idempotent_basis, permutation_spec,
    product_lines as lines_of, DEFAULT_SECTOR_CAP,
};
use fusionforge_core::pointed::{pointed_fusion as pointed_ring, PointedInput};
use fusionforge_core::{Error, FusionRing, GradedFusionRing, ModularData, DEFAULT_TOLERANCE};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(fusionforge, DiagnosticError, PyValueError, "The data do not describe a valid extension.");

fn err(e: Error) -> PyErr {
    if e.is_diagnostic() {
        DiagnosticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("invalid document: {e}"))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn doc<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(x).map_err(json_err)?)
}

/// A catalog name or a modular data JSON document.
fn category(src: &str, tolerance: f64) -> PyResult<ModularData> {
    let md = if src.trim_start().starts_with('{') {
        ModularData::from_json(src)
    } else {
        catalog(src)
    };
    md.and_then(|m| m.with_tolerance(tolerance)).map_err(err)
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    catalog_entries()
}

#[pyfunction]
#[pyo3(signature = (name, tolerance = DEFAULT_TOLERANCE))]
fn modular_data<'py>(py: Python<'py>, name: &str, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    doc(py, &category(name, tolerance)?)
}

/// Fusion ring of a modular category.
#[pyfunction]
#[pyo3(signature = (name, tolerance = DEFAULT_TOLERANCE))]
fn verlinde<'py>(py: Python<'py>, name: &str, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    doc(py, &verlinde_ring(&category(name, tolerance)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (name, g, insertions, outgoing = Vec::new(), tolerance = DEFAULT_TOLERANCE))]
fn genus_coefficient(name: &str, g: u32, insertions: Vec<String>, outgoing: Vec<String>, tolerance: f64) -> PyResult<u64> {
    let md = category(name, tolerance)?;
    let find = |s: &String| {
        md.index_of(s)
            .ok_or_else(|| PyValueError::new_err(format!("unknown label '{s}'")))
    };
    let mut all: Vec<usize> = insertions.iter().map(find).collect::<PyResult<_>>()?;
    for s in &outgoing {
        all.push(md.dual(find(s)?));
    }
    md.genus_coefficient(g, &all).map_err(err)
}

/// Closed-form fusion rules of C≀ℤ/n.
#[pyfunction]
#[pyo3(signature = (name, n, sector_cap = DEFAULT_SECTOR_CAP, tolerance = DEFAULT_TOLERANCE))]
fn permutation_fusion<'py>(py: Python<'py>, name: &str, n: usize, sector_cap: usize, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    let md = category(name, tolerance)?;
    doc(py, &py.detach(|| cyclic_fusion(&md, n, sector_cap)).map_err(err)?)
}

/// One "XY = …" line per product of a graded ring document.
#[pyfunction]
fn product_lines(ring_json: &str) -> PyResult<Vec<String>> {
    let ring: GradedFusionRing = serde_json::from_str(ring_json).map_err(json_err)?;
    Ok(lines_of(&ring))
}

#[pyfunction]
#[pyo3(signature = (input_json, tolerance = DEFAULT_TOLERANCE))]
fn pointed_fusion<'py>(py: Python<'py>, input_json: &str, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    let input: PointedInput = serde_json::from_str(input_json).map_err(json_err)?;
    let (m, l, a) = input.build().map_err(err)?;
    doc(py, &pointed_ring(&m, &l, &a, tolerance).map_err(err)?)
}

/// Runs the recovery algorithm on the modular spec of a category, or on its
/// permutation spec when `n` is given.
#[pyfunction]
#[pyo3(signature = (name, n = None, seed = 0, tolerance = DEFAULT_TOLERANCE))]
fn engine_run<'py>(py: Python<'py>, name: &str, n: Option<usize>, seed: u64, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    let md = category(name, tolerance)?;
    let out = py
        .detach(|| {
            let (spec, reference, labels) = match n {
                Some(n) => {
                    let closed = cyclic_fusion(&md, n, DEFAULT_SECTOR_CAP)?;
                    let labels: Vec<Vec<String>> = (0..n).map(|g| closed.sector_labels(g)).collect();
                    let spec = permutation_spec(&md, n, DEFAULT_SECTOR_CAP)?;
                    (spec, permutation_idempotent_basis(&md, n, DEFAULT_SECTOR_CAP)?, labels)
                }
                None => (modular_spec(&md)?, modular_idempotents(&md), vec![md.labels().to_vec()]),
            };
            recover_fusion(&spec, seed, tolerance)?.relabel(&spec, &reference, &labels, tolerance)
        })
        .map_err(err)?;
    let result = serde_json::json!({
        "ring": out.graded,
        "dplus": out.dplus,
        "c_coefficients": out.coefficient_list(),
    });
    to_py(py, &result)
}

/// Axiom violations of a fusion ring or graded fusion ring document; empty when valid.
#[pyfunction]
#[pyo3(signature = (ring_json, tolerance = DEFAULT_TOLERANCE))]
fn verify<'py>(py: Python<'py>, ring_json: &str, tolerance: f64) -> PyResult<Bound<'py, PyAny>> {
    let raw: Value = serde_json::from_str(ring_json).map_err(json_err)?;
    let violations = if raw.get("sectors").is_some() {
        serde_json::from_value::<GradedFusionRing>(raw).map_err(json_err)?.verify(tolerance)
    } else {
        serde_json::from_value::<FusionRing>(raw).map_err(json_err)?.verify()
    };
    doc(py, &violations)
}

#[pyfunction]
fn parity_check(n: usize) -> bool {
    parity_report(n).passed()
}

#[pymodule]
fn fusionforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", fusionforge_core::VERSION)?;
    m.add("DiagnosticError", m.py().get_type::<DiagnosticError>())?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(modular_data, m)?)?;
    m.add_function(wrap_pyfunction!(verlinde, m)?)?;
    m.add_function(wrap_pyfunction!(genus_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_fusion, m)?)?;
    m.add_function(wrap_pyfunction!(product_lines, m)?)?;
    m.add_function(wrap_pyfunction!(pointed_fusion, m)?)?;
    m.add_function(wrap_pyfunction!(engine_run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(parity_check, m)?)?;
    Ok(())
}
