//! Python bindings. Documents are passed as `str` or `bytes` in their usual file formats.

use std::collections::BTreeMap;

use ::dratkit::checkers::{self, CheckMode, CheckReport, Verdict};
use ::dratkit::formats::{
    parse_dimacs, parse_drat, parse_er, parse_lrat, write_dimacs, write_drat_binary, write_drat_text,
    write_er, write_lrat, ProofStep,
};
use ::dratkit::pipeline::{self, backward_check, CheckedProof};
use ::dratkit::testkit::{self, SolveStatus};
use ::dratkit::{Error, Formula};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyString};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn document_bytes(document: &Bound<'_, PyAny>) -> PyResult<Vec<u8>> {
    if let Ok(text) = document.cast::<PyString>() {
        Ok(text.to_str()?.as_bytes().to_vec())
    } else if let Ok(bytes) = document.cast::<PyBytes>() {
        Ok(bytes.as_bytes().to_vec())
    } else {
        Err(PyValueError::new_err("expected str or bytes"))
    }
}

fn formula(cnf: &Bound<'_, PyAny>) -> PyResult<Formula> {
    Ok(parse_dimacs(&document_bytes(cnf)?).map_err(value_error)?.formula)
}

fn drat(proof: &Bound<'_, PyAny>) -> PyResult<Vec<ProofStep>> {
    parse_drat(&document_bytes(proof)?, None).map_err(value_error)
}

fn mode(name: &str) -> PyResult<CheckMode> {
    match name {
        "operational" => Ok(CheckMode::operational()),
        "specified" => Ok(CheckMode::specified()),
        other => Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    }
}

/// Outcome of a proof check.
#[pyclass(name = "Report", frozen)]
struct PyReport {
    #[pyo3(get)]
    verified: bool,
    /// Index of the rejected step, if any.
    #[pyo3(get)]
    step: Option<usize>,
    #[pyo3(get)]
    reason: Option<String>,
    #[pyo3(get)]
    counters: BTreeMap<String, u64>,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        match (&self.step, &self.reason) {
            (Some(step), Some(reason)) => format!("Report(verified=False, step={step}, reason={reason:?})"),
            _ => "Report(verified=True)".to_string(),
        }
    }
}

impl From<CheckReport> for PyReport {
    fn from(report: CheckReport) -> PyReport {
        let (step, reason) = match report.verdict {
            Verdict::Verified => (None, None),
            Verdict::Rejected { step, reason } => (Some(step), Some(reason.to_string())),
        };
        PyReport {
            verified: report.is_verified(),
            step,
            reason,
            counters: report.counters().iter().map(|&(name, value)| (name.to_string(), value)).collect(),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (cnf, proof, mode = "operational"))]
fn check_drat(cnf: &Bound<'_, PyAny>, proof: &Bound<'_, PyAny>, mode: &str) -> PyResult<PyReport> {
    Ok(checkers::check_drat(&formula(cnf)?, &drat(proof)?, self::mode(mode)?).into())
}

#[pyfunction]
fn check_lrat(cnf: &Bound<'_, PyAny>, proof: &Bound<'_, PyAny>) -> PyResult<PyReport> {
    let steps = parse_lrat(&document_bytes(proof)?).map_err(value_error)?;
    Ok(checkers::check_lrat(&formula(cnf)?, &steps).into())
}

#[pyfunction]
fn check_er(cnf: &Bound<'_, PyAny>, proof: &Bound<'_, PyAny>) -> PyResult<PyReport> {
    let steps = parse_er(&document_bytes(proof)?).map_err(value_error)?;
    Ok(checkers::check_er(&formula(cnf)?, &steps).into())
}

fn checked(cnf: &Bound<'_, PyAny>, proof: &Bound<'_, PyAny>, mode: &str) -> PyResult<CheckedProof> {
    backward_check(&formula(cnf)?, &drat(proof)?, self::mode(mode)?).map_err(|e| match e {
        Error::ForwardRejected { .. } => value_error(format!("proof not verified: {e}")),
        other => value_error(other),
    })
}

/// Returns `(lrat, trimmed_drat, core_cnf)` as strings.
#[pyfunction]
#[pyo3(signature = (cnf, proof, mode = "operational"))]
fn trim(cnf: &Bound<'_, PyAny>, proof: &Bound<'_, PyAny>, mode: &str) -> PyResult<(String, String, String)> {
    let cp = checked(cnf, proof, mode)?;
    let (trimmed, core) = pipeline::emit_trimmed(&cp);
    let text = |bytes: Vec<u8>| String::from_utf8(bytes).expect("writers emit ASCII");
    Ok((
        text(write_lrat(&pipeline::emit_lrat(&cp))),
        text(write_drat_text(&trimmed)),
        text(write_dimacs(&core)),
    ))
}

#[pyfunction]
#[pyo3(signature = (cnf, proof, mode = "operational"))]
fn to_er(cnf: &Bound<'_, PyAny>, proof: &Bound<'_, PyAny>, mode: &str) -> PyResult<String> {
    let er = pipeline::to_er(&checked(cnf, proof, mode)?).map_err(value_error)?;
    Ok(String::from_utf8(write_er(&er)).expect("writers emit ASCII"))
}

/// Returns `("SAT", [literals])` or `("UNSAT", drat_proof)`; the proof is text unless
/// `binary` is set, in which case it is `bytes`.
#[pyfunction]
#[pyo3(signature = (cnf, seed = 0, binary = false))]
fn solve(py: Python<'_>, cnf: &Bound<'_, PyAny>, seed: u64, binary: bool) -> PyResult<(String, Py<PyAny>)> {
    let result = testkit::cdcl_solve(&formula(cnf)?, seed);
    Ok(match result.status {
        SolveStatus::Sat(model) => {
            let lits: Vec<i64> = model.iter().map(|l| l.to_dimacs()).collect();
            ("SAT".to_string(), lits.into_pyobject(py)?.into_any().unbind())
        }
        SolveStatus::Unsat(proof) if binary => (
            "UNSAT".to_string(),
            PyBytes::new(py, &write_drat_binary(&proof)).into_any().unbind(),
        ),
        SolveStatus::Unsat(proof) => {
            let text = String::from_utf8(write_drat_text(&proof)).expect("writers emit ASCII");
            ("UNSAT".to_string(), text.into_pyobject(py)?.into_any().unbind())
        }
    })
}

#[pyfunction]
fn gen_php(n: u32) -> PyResult<String> {
    if n == 0 {
        return Err(PyValueError::new_err("php needs at least one hole"));
    }
    Ok(String::from_utf8(write_dimacs(&testkit::gen_php(n))).expect("writers emit ASCII"))
}

#[pyfunction]
#[pyo3(signature = (vars, clauses, width, seed = 0))]
fn gen_random(vars: u32, clauses: usize, width: usize, seed: u64) -> PyResult<String> {
    if width == 0 || width > vars as usize {
        return Err(PyValueError::new_err("width must be between 1 and the number of variables"));
    }
    let f = testkit::gen_random(vars, clauses, width, seed);
    Ok(String::from_utf8(write_dimacs(&f)).expect("writers emit ASCII"))
}

#[pymodule]
fn dratkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(check_drat, m)?)?;
    m.add_function(wrap_pyfunction!(check_lrat, m)?)?;
    m.add_function(wrap_pyfunction!(check_er, m)?)?;
    m.add_function(wrap_pyfunction!(trim, m)?)?;
    m.add_function(wrap_pyfunction!(to_er, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(gen_php, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    Ok(())
}
