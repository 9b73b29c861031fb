//! Python bindings. Fields cross the boundary as lists of node values on
//! a `Grid`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use glassey_core::estimates::{run_suite, LemmaId};
use glassey_core::lifespan::{fit_exponential, fit_power, predicted_law, sweep, LawKind};
use glassey_core::norms::{lambda_norms as core_lambda_norms, weighted_l2 as core_weighted_l2};
use glassey_core::picard::{picard_run, PicardConfig};
use glassey_core::solver::{energy, evolve, make_profile, DataProfile, EvolveOptions, InitialData};
use glassey_core::{critical_exponents, weight_exponents as core_weight_exponents, LabError, RadialField, RadialGrid};

fn err(e: LabError) -> PyErr {
    match e {
        LabError::PreconditionViolation(_)
        | LabError::Parse(_)
        | LabError::DegenerateInput(_)
        | LabError::NonIntegrable(_)
        | LabError::SupportOverflow { .. }
        | LabError::RangeViolation { .. }
        | LabError::HorizonMismatch { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(RadialGrid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(r_max: f64, num_cells: usize) -> PyResult<Self> {
        RadialGrid::new(r_max, num_cells).map(PyGrid).map_err(err)
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.0.r_max()
    }

    #[getter]
    fn num_cells(&self) -> usize {
        self.0.num_cells()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid(r_max={}, num_cells={})", self.0.r_max(), self.0.num_cells())
    }
}

#[pyclass(name = "Problem", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyProblem(glassey_core::ProblemSpec);

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (n, p, a=1.0, b=0.0))]
    fn new(n: usize, p: f64, a: f64, b: f64) -> PyResult<Self> {
        glassey_core::ProblemSpec::new(n, p, a, b).map(PyProblem).map_err(err)
    }

    #[getter]
    fn regime(&self) -> &'static str {
        self.0.regime().as_str()
    }

    #[getter]
    fn p_c(&self) -> f64 {
        critical_exponents(&self.0).p_c
    }

    #[getter]
    fn s_c(&self) -> f64 {
        critical_exponents(&self.0).s_c
    }

    fn __repr__(&self) -> String {
        let s = &self.0;
        format!("Problem(n={}, p={}, a={}, b={})", s.n_dim, s.p, s.a, s.b)
    }
}

fn field(grid: &PyGrid, values: Vec<f64>) -> PyResult<RadialField> {
    RadialField::new(grid.0, values).map_err(err)
}

fn initial(grid: &PyGrid, u0: Vec<f64>, u1: Vec<f64>) -> PyResult<InitialData> {
    Ok(InitialData { u0: field(grid, u0)?, u1: field(grid, u1)? })
}

/// `‖r^μ ⟨r⟩^ν f‖` in `L²(ℝⁿ)`.
#[pyfunction]
#[pyo3(signature = (grid, values, n, mu=0.0, nu=0.0))]
fn weighted_l2(grid: &PyGrid, values: Vec<f64>, n: usize, mu: f64, nu: f64) -> PyResult<f64> {
    core_weighted_l2(&field(grid, values)?, n, mu, nu).map_err(err)
}

/// `(Λ₁, Λ₂)` of the data.
#[pyfunction]
fn lambda_norms(grid: &PyGrid, u0: Vec<f64>, u1: Vec<f64>, n: usize) -> PyResult<(f64, f64)> {
    let l = core_lambda_norms(&field(grid, u0)?, &field(grid, u1)?, n).map_err(err)?;
    Ok((l.lambda1, l.lambda2))
}

/// `(u₀, u₁)` of the Gaussian profile `ε e^{-(r/w)²}`.
#[pyfunction]
#[pyo3(signature = (grid, epsilon, width=1.0, assign="to_u0"))]
fn gaussian_data(grid: &PyGrid, epsilon: f64, width: f64, assign: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let prof = DataProfile::gaussian(epsilon, width, assign.parse().map_err(err)?);
    let d = make_profile(&prof, &grid.0).map_err(err)?;
    Ok((d.u0.into_values(), d.u1.into_values()))
}

#[pyfunction]
fn weight_exponents(problem: &PyProblem, s1: f64, s2: f64) -> PyResult<(f64, f64)> {
    let w = core_weight_exponents(problem.0.regime(), &problem.0, s1, s2).map_err(err)?;
    Ok((w.delta, w.delta_prime))
}

/// Evolves the data to `t_end`; returns status, blow-up time and the
/// sampled energy series.
#[pyfunction]
#[pyo3(signature = (problem, grid, u0, u1, t_end, linear=false, cfl=0.25, dt_sample=None))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    grid: &PyGrid,
    u0: Vec<f64>,
    u1: Vec<f64>,
    t_end: f64,
    linear: bool,
    cfl: f64,
    dt_sample: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let data = initial(grid, u0, u1)?;
    let mut opts = EvolveOptions::default().with_cfl(cfl);
    if let Some(dt) = dt_sample {
        opts = opts.with_sample_interval(dt);
    }
    let out = evolve(&problem.0, &data, &grid.0, t_end, None, linear, &opts).map_err(err)?;
    let n = problem.0.n_dim;
    let states = out.trajectory.states();
    let times: Vec<f64> = states.iter().map(|s| s.time).collect();
    let energies = states.iter().map(|s| energy(s, n)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("status", out.status.as_str())?;
    d.set_item("t_blowup", out.t_blowup)?;
    d.set_item("peak_gradient", out.peak_gradient)?;
    d.set_item("times", times)?;
    d.set_item("energy", energies)?;
    d.set_item("u_final", out.trajectory.last().u.values().to_vec())?;
    Ok(d)
}

/// Random-field suite for `hardy`, `trace` or `trace_variant`.
#[pyfunction]
#[pyo3(signature = (lemma, n, s, samples, seed, grid))]
fn ineq_suite<'py>(
    py: Python<'py>,
    lemma: &str,
    n: usize,
    s: f64,
    samples: usize,
    seed: u64,
    grid: &PyGrid,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let id: LemmaId = lemma.parse().map_err(err)?;
    let out = py.detach(|| run_suite(id, n, s, samples, seed, &grid.0)).map_err(err)?;
    out.iter()
        .map(|x| {
            let d = PyDict::new(py);
            d.set_item("seed", x.seed)?;
            d.set_item("ratio", x.ratio)?;
            d.set_item("bound", x.bound)?;
            d.set_item("violation", x.violation())?;
            Ok(d)
        })
        .collect()
}

/// Runs the Picard iteration with the regime's default weights.
#[pyfunction]
#[pyo3(signature = (problem, grid, u0, u1, horizon, max_iters=30, tol=1e-10))]
#[allow(clippy::too_many_arguments)]
fn picard<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    grid: &PyGrid,
    u0: Vec<f64>,
    u1: Vec<f64>,
    horizon: f64,
    max_iters: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let data = initial(grid, u0, u1)?;
    let cfg = PicardConfig { max_iters, tol, ..PicardConfig::new(&problem.0).map_err(err)? };
    let run = picard_run(&problem.0, &data, horizon, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("converged", run.converged)?;
    d.set_item("lambda1", run.lambda1)?;
    d.set_item("rho", run.trace.iter().map(|t| t.rho_step).collect::<Vec<_>>())?;
    d.set_item("ratios", run.ratios())?;
    Ok(d)
}

/// Lifespan sweep over increasing amplitudes with a two-rung ladder,
/// plus the regime's fit when one applies.
#[pyfunction]
#[pyo3(signature = (problem, grid, epsilons, horizon, fine_cells=None))]
fn lifespan<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    grid: &PyGrid,
    epsilons: Vec<f64>,
    horizon: f64,
    fine_cells: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let fine = RadialGrid::new(grid.0.r_max(), fine_cells.unwrap_or(2 * grid.0.num_cells())).map_err(err)?;
    let ladder = [grid.0, fine];
    let prof = DataProfile::gaussian(1.0, 1.0, glassey_core::solver::Assignment::ToU0);
    let spec = problem.0;
    let res = py
        .detach(|| sweep(&spec, &prof, &epsilons, &ladder, horizon, &EvolveOptions::default()))
        .map_err(err)?;
    if let Some((_, e)) = res.failures.into_iter().next() {
        return Err(err(e));
    }
    let d = PyDict::new(py);
    d.set_item("epsilon", res.records.iter().map(|r| r.epsilon).collect::<Vec<_>>())?;
    d.set_item("t_observed", res.records.iter().map(|r| r.t_observed).collect::<Vec<_>>())?;
    d.set_item("censored", res.records.iter().map(|r| r.censored).collect::<Vec<_>>())?;
    let fit = match predicted_law(&spec).kind {
        LawKind::Global => None,
        LawKind::PowerLaw { exponent } => Some(fit_power(&res.records, exponent)),
        LawKind::Exponential { .. } => Some(fit_exponential(&res.records, &spec)),
    };
    if let Some(f) = fit {
        let f = f.map_err(err)?;
        let fd = PyDict::new(py);
        fd.set_item("model", f.model.as_str())?;
        fd.set_item("slope", f.slope)?;
        fd.set_item("r_squared", f.r_squared)?;
        fd.set_item("verdict", f.verdict.as_str())?;
        d.set_item("fit", fd)?;
    }
    Ok(d)
}

#[pymodule]
fn glassey_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(weighted_l2, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_norms, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_data, m)?)?;
    m.add_function(wrap_pyfunction!(weight_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(ineq_suite, m)?)?;
    m.add_function(wrap_pyfunction!(picard, m)?)?;
    m.add_function(wrap_pyfunction!(lifespan, m)?)?;
    Ok(())
}
