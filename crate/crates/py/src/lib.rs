//! Python bindings: `Symbol`, `State` and `Measure` classes plus the
//! evolution, limit and diagnostic functions of `walk_core`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use walk_core::bessel;
use walk_core::converge::{self, TableOptions};
use walk_core::evolve::{self as ev, DEFAULT_GUARD};
use walk_core::limit::{self, DEFAULT_QUAD_POINTS};
use walk_core::state::asymmetric_state;
use walk_core::{LatticeState, PointMeasure, TrigSymbol, WalkError};

create_exception!(
    qwalk,
    AliasingError,
    PyRuntimeError,
    "Evolved mass reached the grid's guard band."
);

fn py_err(e: WalkError) -> PyErr {
    match e {
        WalkError::Aliasing { .. } | WalkError::GridCap { .. } => {
            AliasingError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Real trigonometric polynomial `a0 + Σ 2 Re(a_n e^{inθ})`.
#[pyclass(name = "Symbol", module = "qwalk", frozen)]
pub struct Symbol(TrigSymbol);

#[pymethods]
impl Symbol {
    #[new]
    #[pyo3(signature = (a0, coeffs = Vec::new()))]
    fn new(a0: f64, coeffs: Vec<(u32, Complex64)>) -> PyResult<Self> {
        TrigSymbol::new(a0, coeffs).map(Symbol).map_err(py_err)
    }

    #[staticmethod]
    fn konno() -> Self {
        Symbol(TrigSymbol::konno())
    }

    #[staticmethod]
    fn zero() -> Self {
        Symbol(TrigSymbol::zero())
    }

    #[staticmethod]
    fn adjacency() -> Self {
        Symbol(TrigSymbol::adjacency())
    }

    #[staticmethod]
    fn markov_generator(gamma: f64) -> PyResult<Self> {
        TrigSymbol::markov_generator(gamma)
            .map(Symbol)
            .map_err(py_err)
    }

    #[getter]
    fn a0(&self) -> f64 {
        self.0.a0()
    }

    #[getter]
    fn coeffs(&self) -> Vec<(u32, Complex64)> {
        self.0.coeffs().to_vec()
    }

    #[getter]
    fn bandwidth(&self) -> u32 {
        self.0.bandwidth()
    }

    fn eval(&self, theta: f64) -> f64 {
        self.0.eval(theta)
    }

    #[pyo3(signature = (theta, order = 1))]
    fn derivative(&self, theta: f64, order: u32) -> f64 {
        self.0.eval_derivative(theta, order)
    }

    /// Symbol of the velocity operator, `-â'`.
    fn velocity(&self) -> Self {
        Symbol(self.0.velocity_symbol())
    }

    fn max_group_speed(&self) -> f64 {
        self.0.max_group_speed()
    }

    fn speed_bound(&self) -> f64 {
        self.0.speed_bound()
    }

    fn __repr__(&self) -> String {
        format!("Symbol(a0={}, coeffs={:?})", self.0.a0(), self.0.coeffs())
    }
}

/// Finitely supported amplitudes on the integers.
#[pyclass(name = "State", module = "qwalk", frozen)]
pub struct State(LatticeState);

#[pymethods]
impl State {
    #[new]
    #[pyo3(signature = (entries, normalize = false))]
    fn new(entries: Vec<(i64, Complex64)>, normalize: bool) -> PyResult<Self> {
        let psi = LatticeState::from_entries(entries).map_err(py_err)?;
        let psi = if normalize {
            psi.normalized().map_err(py_err)?
        } else {
            psi
        };
        Ok(State(psi))
    }

    #[staticmethod]
    fn basis(n: i64) -> Self {
        State(LatticeState::basis(n))
    }

    #[staticmethod]
    fn asymmetric() -> Self {
        State(asymmetric_state())
    }

    #[getter]
    fn origin(&self) -> i64 {
        self.0.origin()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amps().to_vec()
    }

    fn amplitude(&self, n: i64) -> Complex64 {
        self.0.amplitude(n)
    }

    fn items(&self) -> Vec<(i64, Complex64)> {
        self.0.iter().collect()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn shift(&self, k: i64) -> Self {
        State(self.0.shift(k))
    }

    fn distance(&self, other: &State) -> f64 {
        self.0.distance(&other.0)
    }

    fn inner(&self, other: &State) -> Complex64 {
        self.0.inner(&other.0)
    }

    /// Multiplies amplitude `n` by `e^{ixn}`.
    fn modulate(&self, x: f64) -> Self {
        State(self.0.modulate(x))
    }

    fn __len__(&self) -> usize {
        self.0.width()
    }

    fn __repr__(&self) -> String {
        format!(
            "State(origin={}, width={})",
            self.0.origin(),
            self.0.width()
        )
    }
}

/// Finite weighted atoms on the real line.
#[pyclass(name = "Measure", module = "qwalk", frozen)]
pub struct Measure(PointMeasure);

#[pymethods]
impl Measure {
    #[new]
    fn new(support: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        PointMeasure::new(support, weights)
            .map(Measure)
            .map_err(py_err)
    }

    #[getter]
    fn support(&self) -> Vec<f64> {
        self.0.support().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn total_mass(&self) -> f64 {
        self.0.total_mass()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }

    fn interval_mass(&self, a: f64, b: f64) -> f64 {
        self.0.interval_mass(a, b)
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn moment(&self, k: u32) -> PyResult<f64> {
        self.0.moment(k).map_err(py_err)
    }

    fn characteristic(&self, omega: f64) -> Complex64 {
        self.0.characteristic(omega)
    }

    /// Atoms divided by `t`.
    fn rescaled(&self, t: f64) -> PyResult<Self> {
        limit::rescaled_measure(&self.0, t)
            .map(Measure)
            .map_err(py_err)
    }

    fn ks(&self, other: &Measure) -> f64 {
        converge::ks_distance(&self.0, &other.0)
    }

    fn ks_arcsine(&self) -> f64 {
        converge::ks_distance_to_cdf(&self.0, limit::arcsine_cdf)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "ReportRow", module = "qwalk", frozen, get_all)]
pub struct ReportRow {
    t: f64,
    ks: f64,
    phi_err_max: f64,
    claim_residual: f64,
    runtime_s: f64,
}

#[pyfunction]
#[pyo3(signature = (symbol, state, t, guard = DEFAULT_GUARD))]
fn choose_grid_size(symbol: &Symbol, state: &State, t: f64, guard: u64) -> PyResult<usize> {
    ev::choose_grid_size(&symbol.0, &state.0, t, guard).map_err(py_err)
}

/// `e^{-itA} ψ`; with no grid given the smallest alias-free one is used.
#[pyfunction]
#[pyo3(signature = (symbol, state, t, grid = None, guard = DEFAULT_GUARD))]
fn evolve(
    symbol: &Symbol,
    state: &State,
    t: f64,
    grid: Option<usize>,
    guard: u64,
) -> PyResult<State> {
    let out = match grid {
        Some(m) => ev::evolve_with_guard(&symbol.0, &state.0, t, m, guard),
        None => ev::evolve_auto(&symbol.0, &state.0, t, guard),
    };
    out.map(State).map_err(py_err)
}

/// Truncated-matrix evolution on `[-N, N]`; returns the state and any truncation warning.
#[pyfunction]
fn dense_evolve(
    symbol: &Symbol,
    state: &State,
    t: f64,
    half_width: usize,
) -> PyResult<(State, Option<String>)> {
    let out = ev::dense_oracle_evolve(&symbol.0, &state.0, t, half_width).map_err(py_err)?;
    Ok((State(out.state), out.truncation_warning))
}

#[pyfunction]
fn position_distribution(state: &State) -> Measure {
    Measure(ev::position_distribution(&state.0))
}

#[pyfunction]
#[pyo3(signature = (symbol, state, quad_points = DEFAULT_QUAD_POINTS))]
fn limit_measure(symbol: &Symbol, state: &State, quad_points: usize) -> PyResult<Measure> {
    limit::limit_measure(&symbol.0, &state.0, quad_points)
        .map(Measure)
        .map_err(py_err)
}

#[pyfunction]
fn arcsine_cdf(x: f64) -> f64 {
    limit::arcsine_cdf(x)
}

#[pyfunction]
fn bessel_amplitude(n: i64, t: f64) -> Complex64 {
    bessel::bessel_amplitude(n, t)
}

#[pyfunction]
fn bessel_j(n: i64, t: f64) -> f64 {
    bessel::bessel_j(n, t)
}

/// `Σ P_t(n) e^{iωn/t}` for an unscaled position distribution.
#[pyfunction]
fn phi_empirical(distribution: &Measure, t: f64, omega: f64) -> PyResult<Complex64> {
    converge::phi_empirical(&distribution.0, t, omega).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (symbol, state, omega, quad_points = DEFAULT_QUAD_POINTS))]
fn phi_limit(
    symbol: &Symbol,
    state: &State,
    omega: f64,
    quad_points: usize,
) -> PyResult<Complex64> {
    converge::phi_limit(&symbol.0, &state.0, omega, quad_points).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (symbol, state, t, omega = 1.0, grid = None, guard = DEFAULT_GUARD))]
fn claim_residual(
    symbol: &Symbol,
    state: &State,
    t: f64,
    omega: f64,
    grid: Option<usize>,
    guard: u64,
) -> PyResult<f64> {
    let m = match grid {
        Some(m) => m,
        None => ev::choose_grid_size(&symbol.0, &state.0, t, guard).map_err(py_err)?,
    };
    converge::claim_residual_with_guard(&symbol.0, &state.0, t, omega, m, guard).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (symbol, state, times, omegas, quad_points = DEFAULT_QUAD_POINTS, guard = DEFAULT_GUARD))]
fn convergence_table(
    symbol: &Symbol,
    state: &State,
    times: Vec<f64>,
    omegas: Vec<f64>,
    quad_points: usize,
    guard: u64,
) -> PyResult<Vec<ReportRow>> {
    let opts = TableOptions {
        guard,
        ..TableOptions::default()
    };
    let (report, _, _) =
        converge::convergence_table_with(&symbol.0, &state.0, &times, &omegas, quad_points, &opts)
            .map_err(py_err)?;
    Ok(report
        .rows
        .into_iter()
        .map(|r| ReportRow {
            t: r.t,
            ks: r.ks,
            phi_err_max: r.phi_err_max,
            claim_residual: r.claim_residual,
            runtime_s: r.runtime_s,
        })
        .collect())
}

#[pymodule]
fn qwalk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Symbol>()?;
    m.add_class::<State>()?;
    m.add_class::<Measure>()?;
    m.add_class::<ReportRow>()?;
    m.add("AliasingError", m.py().get_type::<AliasingError>())?;
    m.add_function(wrap_pyfunction!(choose_grid_size, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(dense_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(position_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(limit_measure, m)?)?;
    m.add_function(wrap_pyfunction!(arcsine_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(phi_empirical, m)?)?;
    m.add_function(wrap_pyfunction!(phi_limit, m)?)?;
    m.add_function(wrap_pyfunction!(claim_residual, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    Ok(())
}
