//! Python bindings: replay proof scripts, falsify formulas, run the audits.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use hdl_core::oracle;
use hdl_core::parse::parse_formula_in;
use hdl_core::script::{self, CheckResult, ScriptError};
use hdl_core::EvalBudget;

create_exception!(hdl, KernelRejection, PyException, "A proof step was rejected by the kernel.");

fn budget(window: Option<(i64, i64)>, star_depth: Option<usize>) -> PyResult<EvalBudget> {
    let mut b = EvalBudget::default();
    if let Some(w) = window {
        b.window = w;
    }
    if let Some(d) = star_depth {
        b.star_depth = d;
    }
    b.validate().map_err(PyValueError::new_err)?;
    Ok(b)
}

fn script_err(e: ScriptError) -> PyErr {
    match e {
        ScriptError::Kernel { .. } => KernelRejection::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Outcome of replaying a proof script.
#[pyclass(frozen, module = "hdl")]
struct Report {
    #[pyo3(get)]
    goal: String,
    #[pyo3(get)]
    status: String,
    #[pyo3(get)]
    steps: usize,
    /// `(formula, verdict)` for each assumption.
    #[pyo3(get)]
    gamma: Vec<(String, String)>,
    #[pyo3(get)]
    transcript: String,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!("Report(status={:?}, steps={}, gamma={})", self.status, self.steps, self.gamma.len())
    }
}

impl From<CheckResult> for Report {
    fn from(r: CheckResult) -> Self {
        let gamma = r
            .gamma
            .iter()
            .map(|g| {
                let verdict = if g.screening.counterexample.is_some() {
                    "counterexample"
                } else if g.screened() {
                    "screened"
                } else {
                    "unscreened"
                };
                (hdl_core::print::formula(&g.formula), verdict.to_string())
            })
            .collect();
        Report {
            goal: hdl_core::print::formula(&r.goal),
            status: r.status().to_string(),
            steps: r.steps.len(),
            gamma,
            transcript: r.render(),
        }
    }
}

/// Replays a proof script given as source text.
#[pyfunction]
#[pyo3(signature = (source, window=None, star_depth=None))]
fn check(source: &str, window: Option<(i64, i64)>, star_depth: Option<usize>) -> PyResult<Report> {
    let b = budget(window, star_depth)?;
    script::run_source(source, &b).map(Report::from).map_err(script_err)
}

/// Runs a shipped case study at its own budget.
#[pyfunction]
fn demo(name: &str) -> PyResult<Report> {
    let d = script::demo(name).ok_or_else(|| PyValueError::new_err(format!("unknown demo {name}")))?;
    d.run().map(Report::from).map_err(script_err)
}

#[pyfunction]
fn demos() -> Vec<&'static str> {
    script::DEMOS.iter().map(|d| d.name).collect()
}

/// Returns a counterexample description, or None if the formula is screened.
#[pyfunction]
#[pyo3(signature = (formula, theory="full(semiring(int))", window=None, star_depth=None))]
fn falsify(formula: &str, theory: &str, window: Option<(i64, i64)>, star_depth: Option<usize>) -> PyResult<Option<String>> {
    let b = budget(window, star_depth)?;
    let th = script::parse_theory(theory).map_err(script_err)?;
    let f = parse_formula_in(formula, th.as_ref()).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let found = oracle::falsify(th.as_ref(), &f, &b).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(found.map(|ce| ce.to_string()))
}

/// Parses and pretty-prints a formula.
#[pyfunction]
#[pyo3(signature = (formula, theory="full(semiring(int))"))]
fn normalize(formula: &str, theory: &str) -> PyResult<String> {
    let th = script::parse_theory(theory).map_err(script_err)?;
    let f = parse_formula_in(formula, th.as_ref()).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(hdl_core::print::formula(&f))
}

/// Runs the schema and law audits; returns `(failures, rendered report)`.
#[pyfunction]
#[pyo3(signature = (trials=100, seed=7))]
fn audit(trials: usize, seed: u64) -> (usize, String) {
    let r = oracle::audit(trials, seed);
    (r.failures(), r.render())
}

#[pymodule]
fn hdl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Report>()?;
    m.add("KernelRejection", m.py().get_type::<KernelRejection>())?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(demo, m)?)?;
    m.add_function(wrap_pyfunction!(demos, m)?)?;
    m.add_function(wrap_pyfunction!(falsify, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
