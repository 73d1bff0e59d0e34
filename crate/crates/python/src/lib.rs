//! Python bindings for the `pird` library.
//!
//! Matrices cross the boundary as nested lists of floats (row-major) and
//! channels are addressed by integer index. Results come back as plain
//! dictionaries.

use pird_core::nalgebra::DMatrix;
use pird_core::{
    baselines, psd_from_var, Band, CoarseRule, FrequencyGrid, MmiPid, PirdError, RedundancyLattice, Scenario,
    TimeSeriesMatrix,
};
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: PirdError) -> PyErr {
    match err {
        PirdError::Argument(_) | PirdError::Format(_) => PyValueError::new_err(err.to_string()),
        PirdError::Capability(_) => PyNotImplementedError::new_err(err.to_string()),
        PirdError::Io(_) => PyOSError::new_err(err.to_string()),
        PirdError::Numerical(_) | PirdError::Instability(_) | PirdError::Estimation(_) => {
            PyArithmeticError::new_err(err.to_string())
        }
    }
}

fn matrix(rows: &[Vec<f64>], what: &str) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err(format!("{what}: rows have unequal lengths")));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Vector autoregressive model with Gaussian innovations.
#[pyclass(name = "VarModel", module = "pird", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVarModel {
    inner: pird_core::VarModel,
}

#[pymethods]
impl PyVarModel {
    #[new]
    #[pyo3(signature = (coeffs, sigma, fs = 1.0, names = None))]
    fn new(coeffs: Vec<Vec<Vec<f64>>>, sigma: Vec<Vec<f64>>, fs: f64, names: Option<Vec<String>>) -> PyResult<Self> {
        let sigma = matrix(&sigma, "sigma")?;
        let coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| matrix(a, &format!("coeffs[{k}]")))
            .collect::<PyResult<Vec<_>>>()?;
        let names = names.unwrap_or_else(|| pird_core::var::default_names(sigma.nrows()));
        let inner = pird_core::VarModel::new(coeffs, sigma, fs, names).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Builds a benchmark model: `sim1`, `sim2` (both need `c`) or `sim3`.
    #[staticmethod]
    #[pyo3(signature = (id, c = None))]
    fn scenario(id: &str, c: Option<f64>) -> PyResult<Self> {
        let inner = Scenario::from_id(id, c).and_then(|s| s.build()).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = pird_core::VarModel::from_json(text).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, order, radius, seed = 0))]
    fn random_stable(dim: usize, order: usize, radius: f64, seed: u64) -> PyResult<Self> {
        let inner = pird_core::VarModel::random_stable(dim, order, radius, seed).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn fs(&self) -> f64 {
        self.inner.fs()
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    #[getter]
    fn coeffs(&self) -> Vec<Vec<Vec<f64>>> {
        self.inner.coeffs().iter().map(rows).collect()
    }

    #[getter]
    fn sigma(&self) -> Vec<Vec<f64>> {
        rows(self.inner.sigma())
    }

    fn spectral_radius(&self) -> f64 {
        self.inner.spectral_radius()
    }

    #[pyo3(signature = (eps = pird_core::var::DEFAULT_STABILITY_EPS))]
    fn is_stable(&self, eps: f64) -> bool {
        self.inner.is_stable(eps)
    }

    fn zero_lag_covariance(&self) -> PyResult<Vec<Vec<f64>>> {
        self.inner.zero_lag_covariance().map(|m| rows(&m)).map_err(to_py)
    }

    fn channel_index(&self, name: &str) -> Option<usize> {
        self.inner.channel_index(name)
    }

    /// Simulates `n` samples and returns them as a list of rows.
    #[pyo3(signature = (n, seed = 0, burn_in = 1000))]
    fn simulate(&self, n: usize, seed: u64, burn_in: usize) -> PyResult<Vec<Vec<f64>>> {
        let ts = pird_core::simulate(&self.inner, n, burn_in, seed).map_err(to_py)?;
        Ok(rows(ts.samples()))
    }

    fn __repr__(&self) -> String {
        format!("VarModel(dim={}, order={}, fs={})", self.inner.dim(), self.inner.order(), self.inner.fs())
    }
}

fn series(data: Vec<Vec<f64>>, fs: f64, names: Option<Vec<String>>) -> PyResult<TimeSeriesMatrix> {
    let samples = matrix(&data, "data")?;
    let names = names.unwrap_or_else(|| pird_core::var::default_names(samples.ncols()));
    TimeSeriesMatrix::new(samples, fs, names).map_err(to_py)
}

/// Fits a VAR by least squares. Without `order`, AIC picks it from
/// `1..=max_order` and the AIC curve is returned alongside the model.
#[pyfunction]
#[pyo3(signature = (data, fs = 1.0, names = None, order = None, max_order = 10))]
fn fit(
    data: Vec<Vec<f64>>,
    fs: f64,
    names: Option<Vec<String>>,
    order: Option<usize>,
    max_order: usize,
) -> PyResult<(PyVarModel, Option<Vec<f64>>)> {
    let ts = series(data, fs, names)?;
    let (p, aic) = match order {
        Some(p) => (p, None),
        None => {
            let sel = pird_core::select_order_aic(&ts, max_order).map_err(to_py)?;
            (sel.best_order, Some(sel.aic))
        }
    };
    let inner = pird_core::fit_ols(&ts, p).map_err(to_py)?;
    Ok((PyVarModel { inner }, aic))
}

/// Labels of the redundancy-lattice atoms for `n_sources` sources, in
/// lattice order.
#[pyfunction]
fn lattice_atoms(n_sources: usize) -> PyResult<Vec<String>> {
    let lat = RedundancyLattice::enumerate(n_sources).map_err(to_py)?;
    Ok(lat.atoms().iter().map(ToString::to_string).collect())
}

/// Möbius inversion of per-atom redundancy values into partial values.
#[pyfunction]
fn moebius_invert(n_sources: usize, redundancy: Vec<f64>) -> PyResult<Vec<f64>> {
    let lat = RedundancyLattice::enumerate(n_sources).map_err(to_py)?;
    lat.invert(&redundancy).map_err(to_py)
}

/// Spectral mutual information rate between `target` and `sources`,
/// returned as `(freqs_hz, values)`.
#[pyfunction]
#[pyo3(signature = (model, target, sources, grid = 2049))]
fn spectral_mir(model: &PyVarModel, target: usize, sources: Vec<usize>, grid: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let g = FrequencyGrid::new(grid, model.inner.fs()).map_err(to_py)?;
    let psd = psd_from_var(&model.inner, &g).map_err(to_py)?;
    let prof = pird_core::spectral_mir(&psd, target, &sources).map_err(to_py)?;
    Ok((g.hz(), prof.values().to_vec()))
}

/// Full decomposition of the information shared by `target` and `sources`.
///
/// The returned dict holds `atoms`, `freqs_hz`, per-atom spectral `partial`
/// and `redundancy` profiles, the per-band `time` decomposition and, for at
/// least two sources, the per-band `coarse` terms.
#[pyfunction]
#[pyo3(signature = (model, target, sources, bands = None, grid = 2049, rule = "atoms", diag_load = 0.0))]
#[allow(clippy::too_many_arguments)]
fn decompose<'py>(
    py: Python<'py>,
    model: &PyVarModel,
    target: usize,
    sources: Vec<usize>,
    bands: Option<&str>,
    grid: usize,
    rule: &str,
    diag_load: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let rule: CoarseRule = rule.parse().map_err(to_py)?;
    let bands = match bands {
        Some(s) => Band::parse_list(s).map_err(to_py)?,
        None => Vec::new(),
    };
    let g = FrequencyGrid::new(grid, model.inner.fs()).map_err(to_py)?;
    let mut psd = psd_from_var(&model.inner, &g).map_err(to_py)?;
    if diag_load > 0.0 {
        psd = psd.with_diagonal_loading(diag_load).map_err(to_py)?;
    }
    let res = pird_core::decompose(&psd, target, &sources, &bands, rule).map_err(to_py)?;
    let sp = &res.spectral;

    let out = PyDict::new(py);
    let atoms: Vec<String> = sp.lattice().atoms().iter().map(ToString::to_string).collect();
    out.set_item("atoms", atoms)?;
    out.set_item("freqs_hz", g.hz())?;
    let profiles = |ps: &[pird_core::SpectralProfile]| ps.iter().map(|p| p.values().to_vec()).collect::<Vec<_>>();
    out.set_item("partial", profiles(sp.partial()))?;
    out.set_item("redundancy", profiles(sp.redundancy()))?;
    out.set_item("joint", sp.joint().values().to_vec())?;

    let time = PyDict::new(py);
    for t in &res.time {
        let d = PyDict::new(py);
        d.set_item("partial", t.partial.clone())?;
        d.set_item("redundancy", t.redundancy.clone())?;
        d.set_item("joint", t.joint)?;
        d.set_item("route_gap", t.route_gap())?;
        time.set_item(&t.band.label, d)?;
    }
    out.set_item("time", time)?;

    let coarse = PyDict::new(py);
    for c in &res.coarse {
        let d = PyDict::new(py);
        d.set_item("unique", c.unique.clone())?;
        d.set_item("redundancy", c.redundancy)?;
        d.set_item("synergy", c.synergy)?;
        d.set_item("delta", c.delta)?;
        d.set_item("joint", c.joint)?;
        coarse.set_item(&c.band.label, d)?;
    }
    out.set_item("coarse", coarse)?;
    Ok(out)
}

fn pid_dict<'py>(py: Python<'py>, pid: &MmiPid) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("joint", pid.joint)?;
    d.set_item("marginals", pid.marginals.clone())?;
    d.set_item("unique", pid.unique.clone())?;
    d.set_item("redundancy", pid.redundancy)?;
    d.set_item("synergy", pid.synergy)?;
    Ok(d)
}

/// Gaussian mutual information between one variable and a set of others
/// of a covariance matrix.
#[pyfunction]
fn gaussian_mi(cov: Vec<Vec<f64>>, target: usize, sources: Vec<usize>) -> PyResult<f64> {
    baselines::gaussian_mi(&matrix(&cov, "cov")?, target, &sources).map_err(to_py)
}

/// Minimum-MI partial decomposition of the zero-lag mutual information.
#[pyfunction]
fn static_pid<'py>(py: Python<'py>, model: &PyVarModel, target: usize, sources: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let pid = pird_core::static_pid(&model.inner, target, &sources).map_err(to_py)?;
    pid_dict(py, &pid)
}

/// Minimum-MI partial decomposition of transfer entropies.
#[pyfunction]
#[pyo3(signature = (model, target, sources, order = None, conditioned = false))]
fn te_pid<'py>(
    py: Python<'py>,
    model: &PyVarModel,
    target: usize,
    sources: Vec<usize>,
    order: Option<usize>,
    conditioned: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let pid = pird_core::te_pid(&model.inner, target, &sources, order, conditioned).map_err(to_py)?;
    pid_dict(py, &pid)
}

/// Transfer entropy from `sources` to `target`, conditioned on every other
/// channel of the model.
#[pyfunction]
#[pyo3(signature = (model, sources, target, order = None))]
fn transfer_entropy(model: &PyVarModel, sources: Vec<usize>, target: usize, order: Option<usize>) -> PyResult<f64> {
    pird_core::transfer_entropy(&model.inner, &sources, target, order).map_err(to_py)
}

#[pyfunction]
fn instantaneous_info(model: &PyVarModel, sources: Vec<usize>, target: usize) -> PyResult<f64> {
    pird_core::instantaneous_info(&model.inner, &sources, target).map_err(to_py)
}

/// Splits the mutual information rate into directed and instantaneous parts.
#[pyfunction]
#[pyo3(signature = (model, target, sources, order = None))]
fn mir_split<'py>(
    py: Python<'py>,
    model: &PyVarModel,
    target: usize,
    sources: Vec<usize>,
    order: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = pird_core::mir_split(&model.inner, target, &sources, order).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("te_to_target", s.te_to_target)?;
    d.set_item("te_from_target", s.te_from_target)?;
    d.set_item("instantaneous", s.instantaneous)?;
    d.set_item("total", s.total())?;
    Ok(d)
}

#[pymodule]
fn pird(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVarModel>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_atoms, m)?)?;
    m.add_function(wrap_pyfunction!(moebius_invert, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_mir, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_mi, m)?)?;
    m.add_function(wrap_pyfunction!(static_pid, m)?)?;
    m.add_function(wrap_pyfunction!(te_pid, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(instantaneous_info, m)?)?;
    m.add_function(wrap_pyfunction!(mir_split, m)?)?;
    Ok(())
}
