//! Python bindings for `discrim-core`.
//!
//! Matrices cross the boundary as nested lists of `complex`, counts as dicts
//! keyed by outcome or setting label.

use std::collections::BTreeMap;

use discrim_cli::{CliError, Experiment, ExperimentConfig, Format, Overrides};
use discrim_core::discrimination::{self as disc, OptimizerConfig, PriorPair};
use discrim_core::linalg::{CMat, CVec, C64};
use discrim_core::measurement::{self as meas, CoincidenceCounts, Outcome, TomoEntry, TomographyRecord};
use discrim_core::states::{self, DensityMatrix2Q, PureState2Q};
use discrim_core::tomography::{self as tomo, MleConfig};
use discrim_core::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ConvergenceFailure { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn cli_to_py(e: CliError) -> PyErr {
    match e {
        CliError::Numerical(inner) => to_py(inner),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn mat4(rows: Vec<Vec<C64>>) -> PyResult<CMat<4>> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, r) in rows.iter().enumerate() {
        m[i].copy_from_slice(r);
    }
    Ok(CMat(m))
}

fn priors(p0: f64) -> PyResult<PriorPair> {
    PriorPair::new(p0, 1.0 - p0).map_err(to_py)
}

fn counts_dict(c: &CoincidenceCounts) -> BTreeMap<String, u64> {
    Outcome::ALL.iter().map(|o| (o.as_str().to_string(), c.get(*o))).collect()
}

fn counts_from_dict(d: BTreeMap<String, u64>) -> PyResult<CoincidenceCounts> {
    let mut n = [0u64; 4];
    for (key, value) in d {
        let o: Outcome = key.parse().map_err(to_py)?;
        n[Outcome::ALL.iter().position(|x| *x == o).unwrap()] = value;
    }
    Ok(CoincidenceCounts::new(n[0], n[1], n[2], n[3]))
}

/// Normalized two-qubit pure state in the basis `HH, HV, VH, VV`.
#[pyclass(name = "PureState", module = "discrim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPureState(PureState2Q);

#[pymethods]
impl PyPureState {
    /// Normalizes the given amplitudes.
    #[new]
    fn new(amplitudes: [C64; 4]) -> PyResult<Self> {
        PureState2Q::normalize(CVec(amplitudes)).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn phi0(theta0: f64) -> PyResult<Self> {
        states::phi0(theta0).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn phi1(theta1: f64) -> PyResult<Self> {
        states::phi1(theta1).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn psi_pair(eta: f64) -> PyResult<(Self, Self)> {
        let (a, b) = states::psi_pair(eta).map_err(to_py)?;
        Ok((Self(a), Self(b)))
    }

    #[staticmethod]
    fn bell() -> Self {
        Self(states::bell_phi_plus())
    }

    #[getter]
    fn amplitudes(&self) -> [C64; 4] {
        self.0.amplitudes()
    }

    /// `|⟨self|other⟩|²`.
    fn overlap(&self, other: &Self) -> f64 {
        self.0.overlap_sqr(&other.0)
    }

    fn density(&self) -> PyDensityMatrix {
        PyDensityMatrix(self.0.density())
    }

    /// `v |ψ⟩⟨ψ| + (1 − v) I/4`.
    fn werner(&self, v: f64) -> PyResult<PyDensityMatrix> {
        states::werner_noise(&self.0, v).map(PyDensityMatrix).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let a = self.0.amplitudes();
        format!("PureState([{}, {}, {}, {}])", a[0], a[1], a[2], a[3])
    }
}

/// Two-qubit density matrix.
#[pyclass(name = "DensityMatrix", module = "discrim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix(DensityMatrix2Q);

#[pymethods]
impl PyDensityMatrix {
    /// Accepts a 4x4 nested list. Small rounding errors in hermiticity and
    /// trace are repaired; anything larger raises `ValueError`.
    #[new]
    fn new(matrix: Vec<Vec<C64>>) -> PyResult<Self> {
        DensityMatrix2Q::from_external(mat4(matrix)?).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn maximally_mixed() -> Self {
        Self(DensityMatrix2Q::maximally_mixed())
    }

    fn to_list(&self) -> Vec<Vec<C64>> {
        self.0.mat().0.iter().map(|r| r.to_vec()).collect()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn trace_distance(&self, other: &Self) -> f64 {
        self.0.trace_distance(&other.0)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    fn fidelity(&self, target: &PyPureState) -> PyResult<f64> {
        states::fidelity_pure(&self.0, &target.0).map_err(to_py)
    }

    fn concurrence(&self) -> PyResult<f64> {
        states::concurrence(&self.0).map_err(to_py)
    }

    fn tangle(&self) -> PyResult<f64> {
        states::tangle(&self.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(purity={:.6})", self.0.purity())
    }
}

/// Alice measures, Bob chooses his basis from her outcome.
#[pyclass(name = "FeedForwardProtocol", module = "discrim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProtocol(disc::FeedForwardProtocol);

#[pymethods]
impl PyProtocol {
    /// `{|u⟩,|u⊥⟩}` on Alice, then `{|H⟩,|V⟩}` or `{|V⟩,|H⟩}` on Bob.
    #[staticmethod]
    fn canonical() -> Self {
        Self(disc::FeedForwardProtocol::canonical())
    }

    /// Perfect local protocol for two orthogonal pure states.
    #[staticmethod]
    fn walgate(state0: &PyPureState, state1: &PyPureState) -> PyResult<Self> {
        disc::walgate_decompose(&state0.0, &state1.0).map(Self).map_err(to_py)
    }

    #[getter]
    fn alice_basis(&self) -> [[C64; 2]; 2] {
        self.0.alice_basis().map(|v| v.0)
    }

    fn bob_basis(&self, alice_outcome: usize) -> PyResult<[[C64; 2]; 2]> {
        if alice_outcome > 1 {
            return Err(PyValueError::new_err("alice_outcome must be 0 or 1"));
        }
        Ok(self.0.bob_basis(alice_outcome).map(|v| v.0))
    }

    fn guess(&self, alice_outcome: usize, bob_outcome: usize) -> PyResult<usize> {
        if alice_outcome > 1 || bob_outcome > 1 {
            return Err(PyValueError::new_err("outcomes must be 0 or 1"));
        }
        Ok(self.0.guess(alice_outcome, bob_outcome))
    }

    /// Exact average success probability.
    #[pyo3(signature = (rho0, rho1, p0 = 0.5))]
    fn success(&self, rho0: &PyDensityMatrix, rho1: &PyDensityMatrix, p0: f64) -> PyResult<f64> {
        disc::ff_success_probability(&self.0, &rho0.0, &rho1.0, &priors(p0)?).map_err(to_py)
    }

    /// Four-outcome POVM as `{label: 4x4 matrix}`.
    fn povm(&self) -> PyResult<BTreeMap<String, Vec<Vec<C64>>>> {
        let povm = meas::protocol_to_povm(&self.0).map_err(to_py)?;
        Ok(Outcome::ALL
            .iter()
            .map(|o| (o.as_str().to_string(), povm.get(*o).0.iter().map(|r| r.to_vec()).collect()))
            .collect())
    }
}

#[pyfunction]
#[pyo3(signature = (rho0, rho1, p0 = 0.5))]
fn helstrom_bound(rho0: &PyDensityMatrix, rho1: &PyDensityMatrix, p0: f64) -> PyResult<f64> {
    disc::helstrom_bound(&rho0.0, &rho1.0, &priors(p0)?).map_err(to_py)
}

/// Best local projective measurement without feed-forward. Returns a dict
/// with `success`, `angles`, `alice_basis`, `bob_basis` and `assignment`.
#[pyfunction]
#[pyo3(signature = (rho0, rho1, p0 = 0.5, azimuth_steps = 24, polar_steps = 12, refine_starts = 8))]
fn optimize_local(
    py: Python<'_>,
    rho0: &PyDensityMatrix,
    rho1: &PyDensityMatrix,
    p0: f64,
    azimuth_steps: usize,
    polar_steps: usize,
    refine_starts: usize,
) -> PyResult<Py<PyAny>> {
    let config = OptimizerConfig {
        azimuth_steps,
        polar_steps,
        refine_starts,
        ..Default::default()
    };
    let pri = priors(p0)?;
    let (a, b) = (rho0.0.clone(), rho1.0.clone());
    let opt = py
        .detach(|| disc::optimize_local_projective(&a, &b, &pri, &config))
        .map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("success", opt.success)?;
    d.set_item("angles", opt.angles)?;
    d.set_item("alice_basis", opt.measurement.alice_basis().map(|v| v.0))?;
    d.set_item("bob_basis", opt.measurement.bob_basis().map(|v| v.0))?;
    d.set_item("assignment", *opt.measurement.assignment())?;
    Ok(d.into_any().unbind())
}

/// Samples `n` coincidences of `rho` measured with `protocol`.
#[pyfunction]
fn sample_counts(rho: &PyDensityMatrix, protocol: &PyProtocol, n: u64, seed: u64) -> PyResult<BTreeMap<String, u64>> {
    let povm = meas::protocol_to_povm(&protocol.0).map_err(to_py)?;
    let c = meas::sample_coincidences(&rho.0, &povm, n, seed).map_err(to_py)?;
    Ok(counts_dict(&c))
}

/// Success estimates `(p0, p1, p_avg, sigma_p0, sigma_p1, sigma_avg)` from
/// the count dicts of the two runs.
#[pyfunction]
fn estimate_success(
    counts0: BTreeMap<String, u64>,
    counts1: BTreeMap<String, u64>,
) -> PyResult<(f64, f64, f64, f64, f64, f64)> {
    let e = meas::estimate(&counts_from_dict(counts0)?, &counts_from_dict(counts1)?).map_err(to_py)?;
    Ok((e.p0, e.p1, e.p_avg, e.sigma_p0, e.sigma_p1, e.sigma_avg))
}

/// Poisson counts for the 36 tomography settings, keyed by setting label.
#[pyfunction]
fn simulate_tomography(rho: &PyDensityMatrix, n_per_setting: u64, seed: u64) -> PyResult<BTreeMap<String, u64>> {
    let record = meas::simulate_tomography(&rho.0, n_per_setting, seed).map_err(to_py)?;
    Ok(record.entries().iter().map(|e| (e.setting.label(), e.count)).collect())
}

/// Maximum-likelihood state from tomography counts. Returns
/// `(rho, log_likelihood, iterations, converged)`.
#[pyfunction]
#[pyo3(signature = (counts, max_iterations = 5000, ll_tolerance = 1e-10))]
fn mle_reconstruct(
    py: Python<'_>,
    counts: BTreeMap<String, u64>,
    max_iterations: usize,
    ll_tolerance: f64,
) -> PyResult<(PyDensityMatrix, f64, usize, bool)> {
    let entries = counts
        .into_iter()
        .map(|(label, count)| {
            Ok(TomoEntry {
                setting: label.parse().map_err(to_py)?,
                count,
                exposure: 1.0,
            })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let record = TomographyRecord::new(entries).map_err(to_py)?;
    let config = MleConfig {
        max_iterations,
        ll_tolerance,
        ..Default::default()
    };
    let r = py.detach(|| tomo::mle_reconstruct(&record, &config)).map_err(to_py)?;
    Ok((PyDensityMatrix(r.rho), r.log_likelihood, r.iterations, r.converged))
}

/// Runs one CLI experiment from a JSON config string and returns the
/// rendered report (`format` is `"json"` or `"csv"`). Nothing is written to
/// disk.
#[pyfunction]
#[pyo3(signature = (experiment, config_json = "{}", seed = None, format = "json"))]
fn run_experiment(
    py: Python<'_>,
    experiment: &str,
    config_json: &str,
    seed: Option<u64>,
    format: &str,
) -> PyResult<String> {
    let experiment: Experiment = serde_json::from_value(serde_json::Value::String(experiment.into()))
        .map_err(|_| PyValueError::new_err(format!("unknown experiment `{experiment}`")))?;
    let format: Format = serde_json::from_value(serde_json::Value::String(format.into()))
        .map_err(|_| PyValueError::new_err(format!("unknown format `{format}`")))?;
    let overrides = Overrides {
        seed,
        format: Some(format),
        out: None,
    };
    let config = ExperimentConfig::from_json(config_json)
        .and_then(|c| c.resolve(experiment, &overrides))
        .map_err(cli_to_py)?;
    py.detach(|| {
        let report = discrim_cli::run(&config)?;
        discrim_cli::output::render(&config, &report)
    })
    .map_err(cli_to_py)
}

#[pymodule]
fn discrim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyProtocol>()?;
    m.add_function(wrap_pyfunction!(helstrom_bound, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_local, m)?)?;
    m.add_function(wrap_pyfunction!(sample_counts, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_success, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_tomography, m)?)?;
    m.add_function(wrap_pyfunction!(mle_reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
