use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pade_core::commands::{self, RunConfig};
use pade_core::{analysis, pade, PadeError, PadeIndex, PadeIndexFamily, ScheduleConfig, TolerancePolicy};

fn to_py(e: PadeError) -> PyErr {
    let msg = e.to_string();
    if e.is_certification() {
        PyRuntimeError::new_err(msg)
    } else if e.is_numerical() {
        PyArithmeticError::new_err(msg)
    } else {
        PyValueError::new_err(msg)
    }
}

fn tolerance(tol_rel: f64) -> PyResult<TolerancePolicy> {
    TolerancePolicy::with_tol_rel(tol_rel).map_err(to_py)
}

fn json_text<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("library types serialize")
}

#[pyclass(module = "pade_universal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Polynomial {
    inner: pade_core::Polynomial,
}

#[pymethods]
impl Polynomial {
    #[new]
    #[pyo3(signature = (coeffs, center = Complex64::new(0.0, 0.0)))]
    fn new(coeffs: Vec<Complex64>, center: Complex64) -> PyResult<Self> {
        Ok(Self { inner: pade_core::Polynomial::new(center, coeffs).map_err(to_py)? })
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.inner.center()
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    /// None for the zero polynomial.
    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        self.inner.eval(z)
    }

    fn recenter(&self, center: Complex64) -> Self {
        Self { inner: self.inner.recenter(center) }
    }

    fn taylor_series(&self, center: Complex64, order: usize) -> TruncatedSeries {
        TruncatedSeries { inner: self.inner.taylor_series(center, order) }
    }

    fn to_json(&self) -> String {
        json_text(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Polynomial(degree={:?}, center={})", self.inner.degree(), self.inner.center())
    }
}

#[pyclass(module = "pade_universal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct TruncatedSeries {
    inner: pade_core::TruncatedSeries,
}

#[pymethods]
impl TruncatedSeries {
    #[new]
    #[pyo3(signature = (coeffs, center = Complex64::new(0.0, 0.0)))]
    fn new(coeffs: Vec<Complex64>, center: Complex64) -> PyResult<Self> {
        Ok(Self { inner: pade_core::TruncatedSeries::new(center, coeffs).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.inner.center()
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn to_json(&self) -> String {
        json_text(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.coeffs().len()
    }
}

#[pyclass(module = "pade_universal", frozen)]
struct HankelReport {
    #[pyo3(get)]
    p: usize,
    #[pyo3(get)]
    q: usize,
    #[pyo3(get)]
    det: Complex64,
    #[pyo3(get)]
    scale: f64,
    #[pyo3(get)]
    member: bool,
    #[pyo3(get)]
    near_degenerate: bool,
    #[pyo3(get)]
    tol_rel: f64,
}

#[pymethods]
impl HankelReport {
    fn __repr__(&self) -> String {
        format!(
            "HankelReport(p={}, q={}, member={}, |det|/scale={:e})",
            self.p,
            self.q,
            self.member,
            self.det.norm() / self.scale
        )
    }
}

#[pyclass(module = "pade_universal", frozen)]
struct RationalApproximant {
    inner: pade::RationalApproximant,
}

#[pymethods]
impl RationalApproximant {
    #[getter]
    fn p(&self) -> usize {
        self.inner.index().p
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.index().q
    }

    #[getter]
    fn center(&self) -> Complex64 {
        self.inner.center()
    }

    #[getter]
    fn num(&self) -> Polynomial {
        Polynomial { inner: self.inner.num().clone() }
    }

    #[getter]
    fn den(&self) -> Polynomial {
        Polynomial { inner: self.inner.den().clone() }
    }

    /// None at a pole.
    fn __call__(&self, z: Complex64) -> Option<Complex64> {
        analysis::rat_eval(&self.inner, z).value()
    }

    fn poles(&self) -> PyResult<Vec<Complex64>> {
        Ok(analysis::poles(&self.inner).map_err(to_py)?.poles)
    }

    fn taylor(&self, order: usize) -> PyResult<TruncatedSeries> {
        Ok(TruncatedSeries { inner: self.inner.taylor(order).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        json_text(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("RationalApproximant({}, center={})", self.inner.index(), self.inner.center())
    }
}

#[pyfunction]
#[pyo3(signature = (series, p, q, tol_rel = 1e-9))]
fn membership(series: &TruncatedSeries, p: usize, q: usize, tol_rel: f64) -> PyResult<HankelReport> {
    let r = pade::membership(&series.inner, PadeIndex::new(p, q), &tolerance(tol_rel)?).map_err(to_py)?;
    Ok(HankelReport {
        p: r.p,
        q: r.q,
        det: r.det,
        scale: r.scale,
        member: r.member,
        near_degenerate: r.warning.is_some(),
        tol_rel: r.tol_rel,
    })
}

/// `route` is "linear" or "jacobi".
#[pyfunction]
#[pyo3(signature = (series, p, q, route = "linear", tol_rel = 1e-9))]
fn pade_approximant(series: &TruncatedSeries, p: usize, q: usize, route: &str, tol_rel: f64) -> PyResult<RationalApproximant> {
    let idx = PadeIndex::new(p, q);
    let tol = tolerance(tol_rel)?;
    let inner = match route {
        "linear" => pade::pade_linear_solve(&series.inner, idx, &tol),
        "jacobi" => pade::pade_jacobi(&series.inner, idx, &tol),
        other => return Err(PyValueError::new_err(format!("unknown route '{other}'"))),
    }
    .map_err(to_py)?;
    Ok(RationalApproximant { inner })
}

fn family_from(pairs: Vec<(usize, usize)>) -> PyResult<PadeIndexFamily> {
    PadeIndexFamily::from_members(pairs.into_iter().map(|(p, q)| PadeIndex::new(p, q)).collect()).map_err(to_py)
}

/// Padé-table membership grid as a JSON document.
#[pyfunction]
#[pyo3(signature = (series, p_max, q_max, with_poles = false, tol_rel = 1e-9))]
fn table_json(series: &TruncatedSeries, p_max: usize, q_max: usize, with_poles: bool, tol_rel: f64) -> PyResult<String> {
    let cfg = RunConfig { tol: tolerance(tol_rel)?, seed: 0 };
    Ok(commands::cmd_table(&series.inner, p_max, q_max, with_poles, &cfg).map_err(to_py)?.to_string())
}

/// Pole trajectories along a list of (p, q) pairs, as a JSON document.
#[pyfunction]
#[pyo3(signature = (series, family, tol_rel = 1e-9))]
fn poles_json(series: &TruncatedSeries, family: Vec<(usize, usize)>, tol_rel: f64) -> PyResult<String> {
    let cfg = RunConfig { tol: tolerance(tol_rel)?, seed: 0 };
    Ok(commands::cmd_poles(&series.inner, &family_from(family)?, &cfg).map_err(to_py)?.to_string())
}

/// Runs a schedule given as JSON text; returns the certificate document.
#[pyfunction]
#[pyo3(signature = (config, tol_rel = 1e-9))]
fn universal_json(py: Python<'_>, config: &str, tol_rel: f64) -> PyResult<String> {
    let config: ScheduleConfig = serde_json::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let cfg = RunConfig { tol: tolerance(tol_rel)?, seed: 0 };
    let doc = py.detach(|| commands::cmd_universal(&config, &cfg)).map_err(to_py)?;
    Ok(doc.to_string())
}

#[pymodule]
fn pade_universal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", commands::TOOL_VERSION)?;
    m.add_class::<Polynomial>()?;
    m.add_class::<TruncatedSeries>()?;
    m.add_class::<HankelReport>()?;
    m.add_class::<RationalApproximant>()?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(pade_approximant, m)?)?;
    m.add_function(wrap_pyfunction!(table_json, m)?)?;
    m.add_function(wrap_pyfunction!(poles_json, m)?)?;
    m.add_function(wrap_pyfunction!(universal_json, m)?)?;
    Ok(())
}
