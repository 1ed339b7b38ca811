//! Python bindings. Spaces, symbols and point sets are built from the same
//! string syntax the command line accepts; structured results come back as
//! plain dicts.

use kernelcomp::adjointclassify;
use kernelcomp::certify::{self, KernelExpr, PointMap};
use kernelcomp::operators::{build_matrix, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use kernelcomp::{closedforms, parse, report, Complex64, Point, SpaceDescriptor, SymbolMap};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn err(e: kernelcomp::Error) -> PyErr {
    match e {
        kernelcomp::Error::NumericalBreakdown(_) | kernelcomp::Error::NotConverged { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(xs) => {
            let items = xs.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn dict<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A reproducing-kernel Hilbert space, e.g. `Space("bergman:0.5")`.
#[pyclass(name = "Space", frozen)]
struct PySpace(SpaceDescriptor);

#[pymethods]
impl PySpace {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        parse::space(spec).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `kappa(z, w)` for points given as sequences of complex coordinates.
    fn kernel(&self, z: Vec<Complex64>, w: Vec<Complex64>) -> PyResult<Complex64> {
        self.0.kernel_eval(&Point::new(z), &Point::new(w)).map_err(err)
    }

    fn kernel_norm(&self, z: Vec<Complex64>) -> PyResult<f64> {
        self.0.kernel_norm(&Point::new(z)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Space({})", self.0.to_json())
    }
}

/// A holomorphic self-map of the disk, e.g. `Symbol("automorphism:0.5")`.
#[pyclass(name = "Symbol", frozen)]
struct PySymbol(SymbolMap);

#[pymethods]
impl PySymbol {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        parse::symbol(spec).map(Self).map_err(err)
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.0.eval(z).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Symbol({})", serde_json::to_string(&self.0).unwrap_or_default())
    }
}

/// Norm of the composition operator of the automorphism with zero `p`.
#[pyfunction]
fn inner_norm(p: f64) -> PyResult<f64> {
    closedforms::inner_norm(p).map_err(err)
}

/// Norm on the Hardy space for `phi(z) = a z + b`.
#[pyfunction]
fn affine_norm(a: Complex64, b: Complex64) -> PyResult<f64> {
    closedforms::affine_inner_norm(a, b).map_err(err)
}

/// Largest singular value of the truncated matrix on degrees `0..=truncation`.
#[pyfunction]
#[pyo3(signature = (space, symbol, truncation = 256))]
fn norm_estimate(space: &PySpace, symbol: &PySymbol, truncation: usize) -> PyResult<f64> {
    let m = build_matrix(&space.0, &symbol.0, None, truncation).map_err(err)?;
    Ok(m.norm_estimate(DEFAULT_TOL, DEFAULT_MAX_ITERS).map_err(err)?.sigma_max)
}

/// Forward and adjoint kernel ratios `(forward, adjoint)` for `alpha_p` at `w = -r`.
#[pyfunction]
fn ratio_pair(p: f64, r: f64) -> PyResult<(f64, f64)> {
    let rp = closedforms::ratio_pair(p, r).map_err(err)?;
    Ok((rp.forward_ratio_sq, rp.adjoint_ratio_sq))
}

/// Smallest `c` certified on a point set, a lower bound for the operator norm.
#[pyfunction]
#[pyo3(signature = (symbol, points, space = None, weight = None, reg = 0.0))]
fn min_c<'py>(
    py: Python<'py>,
    symbol: &PySymbol,
    points: &str,
    space: Option<&PySpace>,
    weight: Option<&str>,
    reg: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let k = KernelExpr::space(space.map_or(SpaceDescriptor::HardyDisk, |s| s.0.clone()));
    let pts = parse::point_set(points).map_err(err)?;
    let psi = weight.map(|w| parse::point_function(w, 1)).transpose().map_err(err)?;
    let r = certify::min_c(&k, &k, &PointMap::Disk(symbol.0.clone()), psi.as_ref(), &pts, reg).map_err(err)?;
    dict(py, &r)
}

/// PSD certificate for the space kernel, or for `(1 - conj(psi(w)) psi(z)) kappa`.
#[pyfunction]
#[pyo3(signature = (space, points, weight = None))]
fn psd_check<'py>(py: Python<'py>, space: &PySpace, points: &str, weight: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let mut k = KernelExpr::space(space.0.clone());
    if let Some(w) = weight {
        k = KernelExpr::multiplier(k, parse::point_function(w, space.0.dim()).map_err(err)?);
    }
    let pts = parse::point_set(points).map_err(err)?;
    let cert = certify::psd_check(&certify::gram(&k, &pts).map_err(err)?, None).map_err(err)?;
    dict(py, &cert)
}

/// Decide whether the adjoint of `C_phi` is again a composition operator.
#[pyfunction]
#[pyo3(signature = (space, symbol, degree = adjointclassify::DEFAULT_DEGREE, tau = adjointclassify::DEFAULT_TAU))]
fn classify_adjoint<'py>(
    py: Python<'py>,
    space: &PySpace,
    symbol: &PySymbol,
    degree: usize,
    tau: f64,
) -> PyResult<Bound<'py, PyAny>> {
    dict(py, &adjointclassify::classify(&space.0, &symbol.0, degree, tau).map_err(err)?)
}

/// Full reproduction report for a seed, as a dict.
#[pyfunction]
#[pyo3(signature = (seed = 42))]
fn reproduce(py: Python<'_>, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let rep = py.detach(|| report::reproduce(seed));
    dict(py, &rep)
}

#[pymodule]
fn pykernelcomp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PySymbol>()?;
    m.add_function(wrap_pyfunction!(inner_norm, m)?)?;
    m.add_function(wrap_pyfunction!(affine_norm, m)?)?;
    m.add_function(wrap_pyfunction!(norm_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_pair, m)?)?;
    m.add_function(wrap_pyfunction!(min_c, m)?)?;
    m.add_function(wrap_pyfunction!(psd_check, m)?)?;
    m.add_function(wrap_pyfunction!(classify_adjoint, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
