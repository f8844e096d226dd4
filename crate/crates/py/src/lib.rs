//! Python bindings. Results come back as plain dicts and lists so that scripts
//! need nothing beyond the standard library to use them.

use std::path::PathBuf;

use growthlab_core::bgp::{self as rates, BgpSolution, GridSpec, LaborShares};
use growthlab_core::nonrivalry::{
    fixed_point_decentralized, fixed_point_planner, FixedPointReport, PlannerPrefactor,
    ResaleProblem, RootSearch,
};
use growthlab_core::transition::{self, ShootingConfig};
use growthlab_core::{policy, scenario, Error, ModelParams};
use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

create_exception!(growthlab, ValidationError, PyValueError, "Invalid parameters or configuration.");
create_exception!(growthlab, NonConvergenceError, PyRuntimeError, "A solver failed to converge.");

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        3 => NonConvergenceError::new_err(e.to_string()),
        2 => ValidationError::new_err(e.to_string()),
        _ => PyIOError::new_err(e.to_string()),
    }
}

/// Model parameters, keyed like the `[params]` section of a scenario file.
#[pyclass(name = "Params", from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: ModelParams,
}

fn raw_value(v: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = v.extract::<String>() {
        return Ok(s);
    }
    let x: f64 = v.extract()?;
    Ok(if x == f64::INFINITY {
        "unbounded".to_string()
    } else {
        format!("{x:?}")
    })
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = ModelParams::default();
        if let Some(d) = overrides {
            for (k, v) in d.iter() {
                let key: String = k.extract()?;
                inner.set(&key, &raw_value(&v)?).map_err(to_py)?;
            }
        }
        Ok(PyParams { inner })
    }

    /// Copy with some keys replaced.
    #[pyo3(signature = (**overrides))]
    fn replace(&self, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = self.inner;
        if let Some(d) = overrides {
            for (k, v) in d.iter() {
                let key: String = k.extract()?;
                inner.set(&key, &raw_value(&v)?).map_err(to_py)?;
            }
        }
        Ok(PyParams { inner })
    }

    fn __getitem__(&self, key: &str) -> PyResult<f64> {
        self.inner
            .get(key)
            .ok_or_else(|| pyo3::exceptions::PyKeyError::new_err(key.to_string()))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (k, _) in self.inner.to_pairs() {
            d.set_item(k, self.inner.get(k).unwrap())?;
        }
        Ok(d)
    }

    /// `{"valid": bool, "violated": [(name, detail)], "warnings": [...]}`.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = growthlab_core::validate_params(&self.inner);
        let d = PyDict::new(py);
        d.set_item("valid", r.valid)?;
        let pairs = |v: &[growthlab_core::model::Violation]| -> Vec<(String, String)> {
            v.iter().map(|x| (x.name.to_string(), x.detail.clone())).collect()
        };
        d.set_item("violated", pairs(&r.violated))?;
        d.set_item("warnings", pairs(&r.warnings))?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self
            .inner
            .to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("Params({})", body.join(", "))
    }
}

fn params_or_default(p: Option<PyParams>) -> ModelParams {
    p.map(|p| p.inner).unwrap_or_default()
}

fn solution_dict<'py>(py: Python<'py>, s: &BgpSolution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("g_star", s.growth)?;
    d.set_item("g_phi_star", s.data_growth)?;
    d.set_item("g_mu_star", s.shadow_growth)?;
    d.set_item("r_star", s.interest_rate)?;
    d.set_item("regime", format!("{:?}", s.regime))?;
    d.set_item("constraint_binding", s.constraint_binding)?;
    d.set_item("feasible", s.feasible)?;
    Ok(d)
}

fn shares_dict<'py>(py: Python<'py>, s: &LaborShares) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("s_rd", s.rd_share)?;
    d.set_item("theta", s.theta)?;
    d.set_item("feasible", s.feasible)?;
    Ok(d)
}

/// Balanced growth path. `regime` is one of decentralized, planner,
/// firm-owned, consumer-owned, consumer-constrained.
#[pyfunction]
#[pyo3(signature = (params=None, regime="decentralized"))]
fn bgp<'py>(py: Python<'py>, params: Option<PyParams>, regime: &str) -> PyResult<Bound<'py, PyDict>> {
    let p = params_or_default(params);
    let s = match regime {
        "decentralized" => rates::bgp_decentralized(&p),
        "planner" => rates::bgp_planner(&p),
        "firm-owned" => rates::bgp_firm_ownership(&p),
        "consumer-owned" => rates::bgp_consumer_owned(&p),
        "consumer-constrained" => rates::bgp_consumer_constrained(&p),
        other => return Err(ValidationError::new_err(format!("unknown regime `{other}`"))),
    }
    .map_err(to_py)?;
    solution_dict(py, &s)
}

/// R&D labor shares for the market and the planner, plus the data overuse ratio.
#[pyfunction]
#[pyo3(signature = (params=None))]
fn labor_shares<'py>(py: Python<'py>, params: Option<PyParams>) -> PyResult<Bound<'py, PyDict>> {
    let p = params_or_default(params);
    let d = PyDict::new(py);
    d.set_item("decentralized", shares_dict(py, &rates::labor_share_decentralized(&p).map_err(to_py)?)?)?;
    d.set_item("planner", shares_dict(py, &rates::labor_share_planner(&p).map_err(to_py)?)?)?;
    d.set_item("overuse_ratio", rates::data_overuse_ratio(&p).map_err(to_py)?)?;
    Ok(d)
}

/// One dict per cell, ordered sigma, then xi, then zeta.
#[pyfunction]
#[pyo3(signature = (xi, zeta, sigma, params=None))]
fn misallocation_grid<'py>(
    py: Python<'py>,
    xi: Vec<f64>,
    zeta: Vec<f64>,
    sigma: Vec<f64>,
    params: Option<PyParams>,
) -> PyResult<Bound<'py, PyList>> {
    let p = params_or_default(params);
    let report = py.detach(|| rates::misallocation_grid(&p, &GridSpec { xi, zeta, sigma }));
    let out = PyList::empty(py);
    for c in &report.cells {
        let d = PyDict::new(py);
        d.set_item("xi", c.xi)?;
        d.set_item("zeta", c.zeta)?;
        d.set_item("sigma", c.sigma)?;
        d.set_item("s_rd_planner", c.rd_share_planner)?;
        d.set_item("s_rd_decentralized", c.rd_share_decentralized)?;
        d.set_item("gap", c.gap)?;
        d.set_item("overuse_ratio", c.overuse_ratio)?;
        d.set_item("feasible", c.feasible)?;
        d.set_item("violations", c.violations.clone())?;
        out.append(d)?;
    }
    Ok(out)
}

/// Subsidies that restore the planner's R&D share.
#[pyfunction]
#[pyo3(signature = (params=None))]
fn policy_rates<'py>(py: Python<'py>, params: Option<PyParams>) -> PyResult<Bound<'py, PyDict>> {
    let p = params_or_default(params);
    let r = policy::policy_report(&p).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("tau_labor", r.rates.tau_labor)?;
    d.set_item("tau_profit", r.rates.tau_profit)?;
    d.set_item("tau_labor_unscaled", r.rates.tau_labor_unscaled)?;
    d.set_item("valid", r.rates.valid)?;
    d.set_item("theta_d_subsidized", r.theta_subsidized)?;
    d.set_item("theta_s", r.theta_planner)?;
    d.set_item("share_gap_after_subsidy", r.share_gap_after_subsidy)?;
    Ok(d)
}

fn roots_list(report: &FixedPointReport) -> Vec<(f64, f64, bool, bool)> {
    report
        .roots
        .iter()
        .map(|r| (r.value, r.residual, r.in_unit_interval, r.trivial))
        .collect()
}

/// Resale fixed points at destruction intensity `c0` as
/// `(root, residual, in_unit_interval, trivial)` tuples.
#[pyfunction]
#[pyo3(signature = (c0, regime="decentralized", prefactor="stock-integral", params=None))]
fn resale_roots(
    c0: f64,
    regime: &str,
    prefactor: &str,
    params: Option<PyParams>,
) -> PyResult<Vec<(f64, f64, bool, bool)>> {
    let p = params_or_default(params);
    let prob = ResaleProblem::from_params(&p).map_err(to_py)?.with_destruction(c0);
    let search = RootSearch::default();
    let report = match regime {
        "decentralized" => fixed_point_decentralized(&prob, &search),
        "planner" => {
            let v = PlannerPrefactor::from_name(prefactor)
                .ok_or_else(|| ValidationError::new_err(format!("unknown prefactor `{prefactor}`")))?;
            fixed_point_planner(&prob, v, &search)
        }
        other => return Err(ValidationError::new_err(format!("unknown regime `{other}`"))),
    }
    .map_err(to_py)?;
    Ok(roots_list(&report))
}

/// Planner transition path as a dict of equal-length columns plus diagnostics.
#[pyfunction]
#[pyo3(signature = (params=None, constrained=false, dt=0.1, horizon=1000.0, target_growth=Some(1e-4)))]
fn solve_transition<'py>(
    py: Python<'py>,
    params: Option<PyParams>,
    constrained: bool,
    dt: f64,
    horizon: f64,
    target_growth: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params_or_default(params);
    let cfg = ShootingConfig {
        dt,
        horizon,
        target_growth,
        ..Default::default()
    };
    let tr = py
        .detach(|| transition::solve_transition(&p, &cfg, constrained))
        .map_err(to_py)?;
    let col = |f: &dyn Fn(&transition::TrajectorySample) -> f64| -> Vec<f64> {
        tr.samples.iter().map(f).collect()
    };
    let d = PyDict::new(py);
    d.set_item("t", col(&|s| s.state.time))?;
    d.set_item("g_N", col(&|s| s.state.variety_growth))?;
    d.set_item("g_mu", col(&|s| s.state.shadow_growth))?;
    d.set_item("l_E", col(&|s| s.state.production_share()))?;
    d.set_item("g_c", col(&|s| s.consumption_growth))?;
    d.set_item("g_phi", col(&|s| s.data_growth))?;
    d.set_item("phi_level", col(&|s| s.phi_level))?;
    d.set_item("phi_cumulative", col(&|s| s.phi_cumulative))?;
    d.set_item("binding", tr.samples.iter().map(|s| s.binding).collect::<Vec<_>>())?;
    let diag = PyDict::new(py);
    diag.set_item("terminal_distance", tr.diagnostics.terminal_distance)?;
    diag.set_item("stop_reason", tr.diagnostics.stop_reason.clone())?;
    diag.set_item("steps", tr.diagnostics.steps)?;
    diag.set_item("chattering", tr.diagnostics.chattering)?;
    d.set_item("diagnostics", diag)?;
    Ok(d)
}

/// Arrival times at the BGP for each (start growth, slack) pair; `None` when the
/// path never gets there. Use `float("inf")` for an unbounded slack.
#[pyfunction]
#[pyo3(signature = (starts, slacks, params=None, horizon=5000.0))]
fn growth_trap(
    py: Python<'_>,
    starts: Vec<f64>,
    slacks: Vec<f64>,
    params: Option<PyParams>,
    horizon: f64,
) -> PyResult<Vec<(f64, f64, Option<f64>)>> {
    let p = params_or_default(params);
    let cfg = ShootingConfig {
        horizon,
        share_margin: 1e-30,
        growth_floor: 1e-30,
        ..Default::default()
    };
    let report = py
        .detach(|| transition::growth_trap_experiment(&p, &starts, &slacks, &cfg))
        .map_err(to_py)?;
    Ok(report
        .runs
        .iter()
        .map(|r| (r.start, r.slack, r.arrival_time))
        .collect())
}

/// `(name, description)` for every preset.
#[pyfunction]
fn presets() -> Vec<(&'static str, &'static str)> {
    scenario::list_presets()
        .iter()
        .map(|p| (p.name, p.description))
        .collect()
}

/// Run a preset and return the written file paths.
#[pyfunction]
#[pyo3(signature = (name, out=None))]
fn run_preset(py: Python<'_>, name: &str, out: Option<PathBuf>) -> PyResult<Vec<String>> {
    let outcome = py
        .detach(|| scenario::run_preset(name, out.as_deref()))
        .map_err(to_py)?;
    Ok(outcome
        .files
        .iter()
        .map(|f| outcome.dir.join(f).display().to_string())
        .collect())
}

#[pymodule]
fn growthlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", growthlab_core::VERSION)?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add("NonConvergenceError", m.py().get_type::<NonConvergenceError>())?;
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(bgp, m)?)?;
    m.add_function(wrap_pyfunction!(labor_shares, m)?)?;
    m.add_function(wrap_pyfunction!(misallocation_grid, m)?)?;
    m.add_function(wrap_pyfunction!(policy_rates, m)?)?;
    m.add_function(wrap_pyfunction!(resale_roots, m)?)?;
    m.add_function(wrap_pyfunction!(solve_transition, m)?)?;
    m.add_function(wrap_pyfunction!(growth_trap, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    Ok(())
}
