//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers; campaign results come back as dicts.

use cohkit_core as ck;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ck::aklt::{AkltParams, RdmForm};
use ck::channels::{Ensemble, ScanConfig, SplitRule};
use ck::coherence::ExpectationData;
use ck::dynamics::{DephaseMode, SqueezeBasis, SqueezingConfig};
use ck::{CMatrix, Norm, NormChoice, C64};

create_exception!(_cohkit, CohkitError, PyValueError);
create_exception!(_cohkit, NumericalError, PyRuntimeError);

fn err(e: ck::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        CohkitError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| CohkitError::new_err(e.to_string()))
}

fn choice(basis: &ck::ObservableBasis, norm: Option<&str>, approximate: bool) -> PyResult<NormChoice> {
    let mut c = NormChoice::default_for(basis);
    if let Some(n) = norm {
        c.norm = parse::<Norm>(n)?;
    }
    c.approximate = approximate;
    Ok(c)
}

fn to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CohkitError::new_err("matrix rows must all have the same length as the row count"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[pyclass(name = "DensityMatrix", frozen)]
#[derive(Clone)]
struct PyDensityMatrix(ck::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    #[new]
    #[pyo3(signature = (rows, split=None))]
    fn new(rows: Vec<Vec<C64>>, split: Option<(usize, usize)>) -> PyResult<Self> {
        let rho = ck::DensityMatrix::new(from_rows(rows)?).map_err(err)?;
        Ok(Self(match split {
            Some((a, b)) => rho.with_split(a, b).map_err(err)?,
            None => rho,
        }))
    }

    #[staticmethod]
    #[pyo3(signature = (amplitudes, split=None))]
    fn from_pure(amplitudes: Vec<C64>, split: Option<(usize, usize)>) -> PyResult<Self> {
        let rho = ck::DensityMatrix::from_pure(&amplitudes).map_err(err)?;
        Ok(Self(match split {
            Some((a, b)) => rho.with_split(a, b).map_err(err)?,
            None => rho,
        }))
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> PyResult<Self> {
        ck::DensityMatrix::maximally_mixed(dim).map(Self).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        ck::io::parse_state(text).map(Self).map_err(|e| CohkitError::new_err(e.to_string()))
    }

    fn to_toml(&self) -> String {
        ck::io::write_state(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn split(&self) -> Option<(usize, usize)> {
        self.0.split()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        to_rows(self.0.matrix())
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.0.eigenvalues().map_err(err)
    }

    fn dephased(&self) -> Self {
        Self(ck::matcore::dephase(&self.0))
    }

    fn __repr__(&self) -> String {
        match self.0.split() {
            Some((a, b)) => format!("DensityMatrix(dim={}, split=({a}, {b}))", self.0.dim()),
            None => format!("DensityMatrix(dim={})", self.0.dim()),
        }
    }
}

#[pyclass(name = "ObservableBasis", frozen)]
#[derive(Clone)]
struct PyObservableBasis(ck::ObservableBasis);

#[pymethods]
impl PyObservableBasis {
    /// Tags: `standard:D`, `pauli`, `gellmann:d`, `spin:n`, `prod(<tag>,<tag>)`.
    #[new]
    fn new(tag: &str) -> PyResult<Self> {
        ck::ObservableBasis::from_tag(tag).map(Self).map_err(err)
    }

    #[staticmethod]
    fn product(a: &PyObservableBasis, b: &PyObservableBasis) -> Self {
        Self(ck::ObservableBasis::product(a.0.clone(), b.0.clone()))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn tag(&self) -> String {
        self.0.tag().to_string()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.labels().to_vec()
    }

    #[getter]
    fn is_complete(&self) -> bool {
        self.0.is_complete()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn op(&self, l: usize) -> PyResult<Vec<Vec<C64>>> {
        if l >= self.0.len() {
            return Err(CohkitError::new_err(format!("operator index {l} out of range")));
        }
        Ok(to_rows(&self.0.op(l)))
    }

    /// `<S_l>` for every operator.
    fn expectations(&self, rho: &PyDensityMatrix) -> PyResult<Vec<f64>> {
        self.0.expectations(rho.0.matrix()).map_err(err)
    }

    /// Reassembles `sum_l S_l values[l]`.
    fn resum(&self, values: Vec<f64>) -> PyResult<Vec<Vec<C64>>> {
        self.0.resum(&values).map(|m| to_rows(&m)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ObservableBasis('{}')", self.0.tag())
    }
}

#[pyclass(name = "CoherenceReport", frozen, get_all)]
#[derive(Clone)]
struct PyCoherenceReport {
    c: f64,
    c_l: f64,
    delta: f64,
    norm: String,
    truncated: bool,
    slack: f64,
}

impl From<ck::CoherenceReport> for PyCoherenceReport {
    fn from(r: ck::CoherenceReport) -> Self {
        Self {
            c: r.c,
            c_l: r.c_l,
            delta: r.delta,
            norm: r.norm.to_string(),
            truncated: r.truncated,
            slack: r.slack,
        }
    }
}

#[pymethods]
impl PyCoherenceReport {
    fn __repr__(&self) -> String {
        format!(
            "CoherenceReport(C={:.12}, C_L={:.12}, delta={:.12}, norm='{}', truncated={})",
            self.c, self.c_l, self.delta, self.norm, self.truncated
        )
    }
}

#[pyfunction]
#[pyo3(signature = (rho, basis, norm=None, approximate=false))]
fn coherence(rho: &PyDensityMatrix, basis: &PyObservableBasis, norm: Option<&str>, approximate: bool) -> PyResult<f64> {
    ck::coherence::coherence_total(&rho.0, &basis.0, choice(&basis.0, norm, approximate)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, basis, norm=None, approximate=false))]
fn local_coherence(rho: &PyDensityMatrix, basis: &PyObservableBasis, norm: Option<&str>, approximate: bool) -> PyResult<f64> {
    ck::coherence::coherence_local(&rho.0, &basis.0, choice(&basis.0, norm, approximate)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, basis, norm=None, approximate=false))]
fn global_correlation(rho: &PyDensityMatrix, basis: &PyObservableBasis, norm: Option<&str>, approximate: bool) -> PyResult<f64> {
    ck::coherence::global_correlation(&rho.0, &basis.0, choice(&basis.0, norm, approximate)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rho, basis, norm=None, approximate=false))]
fn report(rho: &PyDensityMatrix, basis: &PyObservableBasis, norm: Option<&str>, approximate: bool) -> PyResult<PyCoherenceReport> {
    ck::coherence::report(&rho.0, &basis.0, choice(&basis.0, norm, approximate)?)
        .map(Into::into)
        .map_err(err)
}

/// Coherence from measured expectations and diagonal populations, with no
/// density matrix. Product bases give a full report, others the total only.
#[pyfunction]
#[pyo3(signature = (basis, values, populations, norm=None, approximate=false))]
fn report_from_expectations(
    py: Python<'_>,
    basis: &PyObservableBasis,
    values: Vec<f64>,
    populations: Vec<f64>,
    norm: Option<&str>,
    approximate: bool,
) -> PyResult<Py<PyAny>> {
    let data = ExpectationData::from_populations(&basis.0, values, &populations).map_err(err)?;
    let c = choice(&basis.0, norm, approximate)?;
    if basis.0.factors().is_some() {
        let r: PyCoherenceReport = data.report(&basis.0, c).map_err(err)?.into();
        Ok(Py::new(py, r)?.into_any())
    } else {
        Ok(data.coherence(&basis.0, c).map_err(err)?.into_pyobject(py)?.into_any().unbind())
    }
}

/// One row of the separable/entangled mixture family on two `d`-level systems.
#[pyfunction]
#[pyo3(signature = (d, mu, with_truncated=false))]
fn family_row<'py>(py: Python<'py>, d: usize, mu: f64, with_truncated: bool) -> PyResult<Bound<'py, PyDict>> {
    let row = ck::family::family_row(d, mu, with_truncated).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("mu", row.mu)?;
    out.set_item("C", row.c)?;
    out.set_item("C_L", row.c_l)?;
    out.set_item("delta", row.delta)?;
    if with_truncated {
        out.set_item("C_trunc", row.c_trunc)?;
        out.set_item("C_L_trunc", row.c_l_trunc)?;
        out.set_item("delta_trunc", row.delta_trunc)?;
    }
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (g, r, form="consistent"))]
fn aklt_row<'py>(py: Python<'py>, g: f64, r: u32, form: &str) -> PyResult<Bound<'py, PyDict>> {
    let p = AkltParams::new(g, r).map_err(err)?;
    let row = ck::aklt::aklt_row(p, parse::<RdmForm>(form)?).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("g", row.g)?;
    out.set_item("r", row.r)?;
    out.set_item("C_full", row.c_full)?;
    out.set_item("C_truncated_frobenius", row.c_truncated_frobenius)?;
    out.set_item("C_truncated_schatten1", row.c_truncated_schatten1)?;
    out.set_item("C_analytic_full", row.c_analytic_full)?;
    out.set_item("C_analytic_truncated", row.c_analytic_truncated)?;
    Ok(out)
}

/// Dephased squeezing trajectory as a dict of equal-length lists.
#[pyfunction]
#[pyo3(signature = (n, gamma=1.0, t_max=2.0, dt=1e-3, sample_every=0.01, basis="full", dephase="both"))]
#[allow(clippy::too_many_arguments)]
fn evolve_squeezing<'py>(
    py: Python<'py>,
    n: usize,
    gamma: f64,
    t_max: f64,
    dt: f64,
    sample_every: f64,
    basis: &str,
    dephase: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = SqueezingConfig {
        gamma,
        t_max,
        dt,
        sample_every,
        basis: parse::<SqueezeBasis>(basis)?,
        dephase: parse::<DephaseMode>(dephase)?,
        ..SqueezingConfig::new(n)
    };
    let traj = py.detach(|| ck::dynamics::evolve_squeezing(&cfg)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("t", traj.times.clone())?;
    out.set_item("C", traj.reports.iter().map(|r| r.c).collect::<Vec<_>>())?;
    out.set_item("C_L", traj.reports.iter().map(|r| r.c_l).collect::<Vec<_>>())?;
    out.set_item("delta", traj.reports.iter().map(|r| r.delta).collect::<Vec<_>>())?;
    out.set_item("basis", traj.basis_tag.clone())?;
    out.set_item("max_trace_drift", traj.max_trace_drift)?;
    out.set_item("first_peak", traj.first_peak())?;
    Ok(out)
}

/// Channel-average monotonicity campaign; one dict per `(dim, n_kraus)`.
#[pyfunction]
#[pyo3(signature = (params, trials, seed, ensemble="ginibre-mixed-rank"))]
fn c2b_campaign<'py>(
    py: Python<'py>,
    params: Vec<(usize, usize)>,
    trials: usize,
    seed: u64,
    ensemble: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let ensemble = parse::<Ensemble>(ensemble)?;
    let summary = py
        .detach(|| ck::channels::c2b_campaign(&params, trials, ensemble, seed))
        .map_err(err)?;
    summary
        .into_iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("dim", s.dim)?;
            d.set_item("n_kraus", s.n_kraus)?;
            d.set_item("trials", s.trials)?;
            d.set_item("violations", s.violations)?;
            d.set_item("worst_excess", s.worst_excess)?;
            Ok(d)
        })
        .collect()
}

/// Truncation scan: how often a basis subset has a larger norm than the whole.
#[pyfunction]
#[pyo3(signature = (dim, trials, seed, split_rule="random-basis", ensemble="ginibre", norm="schatten1"))]
fn truncation_scan<'py>(
    py: Python<'py>,
    dim: usize,
    trials: usize,
    seed: u64,
    split_rule: &str,
    ensemble: &str,
    norm: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ScanConfig {
        split_rule: parse::<SplitRule>(split_rule)?,
        ensemble: parse::<Ensemble>(ensemble)?,
        norm: parse::<Norm>(norm)?,
        ..ScanConfig::new(dim, trials, seed)
    };
    let r = py.detach(|| ck::channels::truncation_violation_scan(&cfg)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("dim", r.dim)?;
    d.set_item("trials", r.trials)?;
    d.set_item("violations", r.violations)?;
    d.set_item("frequency", r.violation_frequency)?;
    d.set_item("mean_violation", r.mean_violation)?;
    Ok(d)
}

#[pymodule]
fn _cohkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CohkitError", m.py().get_type::<CohkitError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyObservableBasis>()?;
    m.add_class::<PyCoherenceReport>()?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(local_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(global_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(report_from_expectations, m)?)?;
    m.add_function(wrap_pyfunction!(family_row, m)?)?;
    m.add_function(wrap_pyfunction!(aklt_row, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_squeezing, m)?)?;
    m.add_function(wrap_pyfunction!(c2b_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_scan, m)?)?;
    Ok(())
}
