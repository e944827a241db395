//! Python bindings for the `normeuclid` core crate.
//!
//! Ring elements carry coordinates in the E8 basis B as Python ints. Field
//! data is loaded through the same on-disk cache as the command-line tool.

use normeuclid::cli::load_field;
use normeuclid::euclid;
use normeuclid::exactalg::Vec8Z;
use normeuclid::numberfield::{FieldId, RingElement};
use normeuclid::{analysis, Error, Integer, Rational};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::{PyInt, PyList, PyTuple};

create_exception!(normeuclid_py, NormEuclidError, PyException, "Arithmetic or verification failure in the core library.");

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        Error::Parse(_) | Error::FieldMismatch(..) => PyValueError::new_err(e.to_string()),
        _ => NormEuclidError::new_err(format!("{}: {e}", e.kind())),
    }
}

fn field_id(name: &str) -> PyResult<FieldId> {
    name.parse().map_err(to_py_err)
}

fn int_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Integer> {
    // bool is a subclass of int and is refused
    if !obj.is_instance_of::<PyInt>() || obj.is_instance_of::<pyo3::types::PyBool>() {
        return Err(PyValueError::new_err(format!("coordinate {obj} is not an int")));
    }
    let text = obj.str()?;
    Integer::from_str_radix(text.to_str()?, 10).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn int_to_py<'py>(py: Python<'py>, n: &Integer) -> PyResult<Bound<'py, PyAny>> {
    py.import("builtins")?.getattr("int")?.call1((n.to_string(),))
}

fn fraction_to_py<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let num = int_to_py(py, q.numer())?;
    let den = int_to_py(py, q.denom())?;
    py.import("fractions")?.getattr("Fraction")?.call1((num, den))
}

fn json_to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.getattr("loads")?.call1((text,))
}

/// An element of the ring of integers, in B coordinates.
#[pyclass(name = "RingElement", module = "normeuclid_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyRingElement {
    inner: RingElement,
}

impl PyRingElement {
    fn wrap(inner: RingElement) -> Self {
        PyRingElement { inner }
    }
}

#[pymethods]
impl PyRingElement {
    #[new]
    fn new(field: &str, coords: &Bound<'_, PyAny>) -> PyResult<Self> {
        let id = field_id(field)?;
        let items: Vec<Bound<'_, PyAny>> = coords.try_iter()?.collect::<PyResult<_>>()?;
        if items.len() != 8 {
            return Err(PyValueError::new_err(format!("expected 8 coordinates, got {}", items.len())));
        }
        let ints = items.iter().map(int_from_py).collect::<PyResult<Vec<_>>>()?;
        load_field(id);
        Ok(Self::wrap(RingElement::new(id, Vec8Z::from_fn(|i| ints[i].clone()))))
    }

    /// The ring's multiplicative identity.
    #[staticmethod]
    fn one(field: &str) -> PyResult<Self> {
        Ok(Self::wrap(load_field(field_id(field)?).one()))
    }

    #[getter]
    fn field(&self) -> &'static str {
        self.inner.field.name()
    }

    #[getter]
    fn coords<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let items = self.inner.coords.0.iter().map(|c| int_to_py(py, c)).collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, items)
    }

    /// `N(x)`, signed.
    fn norm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        int_to_py(py, &load_field(self.inner.field).norm_ring(&self.inner))
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __add__(&self, o: &Self) -> PyResult<Self> {
        self.inner.add(&o.inner).map(Self::wrap).map_err(to_py_err)
    }

    fn __sub__(&self, o: &Self) -> PyResult<Self> {
        self.inner.sub(&o.inner).map(Self::wrap).map_err(to_py_err)
    }

    fn __mul__(&self, o: &Self) -> PyResult<Self> {
        load_field(self.inner.field).mul_ring(&self.inner, &o.inner).map(Self::wrap).map_err(to_py_err)
    }

    fn __neg__(&self) -> Self {
        Self::wrap(self.inner.neg())
    }

    fn __repr__(&self) -> String {
        let cs: Vec<String> = self.inner.coords.0.iter().map(|c| c.to_string()).collect();
        format!("RingElement('{}', [{}])", self.inner.field, cs.join(", "))
    }
}

/// `(q, r, norm_ratio)` with `a = b·q + r` and `|N(r)| / |N(b)|` as a Fraction.
#[pyfunction]
fn divide<'py>(py: Python<'py>, a: &PyRingElement, b: &PyRingElement) -> PyResult<Bound<'py, PyTuple>> {
    let d = euclid::divide(&a.inner, &b.inner).map_err(to_py_err)?;
    let ratio = fraction_to_py(py, &d.norm_ratio())?;
    (PyRingElement::wrap(d.quotient), PyRingElement::wrap(d.remainder), ratio).into_pyobject(py)
}

/// `(g, u, v)` with `u·a + v·b = g`. The gcd is not normalized.
#[pyfunction]
fn xgcd(a: &PyRingElement, b: &PyRingElement) -> PyResult<(PyRingElement, PyRingElement, PyRingElement)> {
    let r = euclid::xgcd(&a.inner, &b.inner).map_err(to_py_err)?;
    Ok((PyRingElement::wrap(r.g), PyRingElement::wrap(r.u), PyRingElement::wrap(r.v)))
}

/// `a / b`, raising when the quotient is not integral.
#[pyfunction]
fn exact_div(a: &PyRingElement, b: &PyRingElement) -> PyResult<PyRingElement> {
    euclid::exact_div(&a.inner, &b.inner).map(PyRingElement::wrap).map_err(to_py_err)
}

#[pyfunction]
fn is_unit(x: &PyRingElement) -> bool {
    euclid::is_unit(&x.inner)
}

/// `Δ_K / 4096` as a Fraction.
#[pyfunction]
fn norm_bound<'py>(py: Python<'py>, field: &str) -> PyResult<Bound<'py, PyAny>> {
    fraction_to_py(py, &field_id(field)?.norm_bound())
}

/// Certified field data as a dict.
#[pyfunction]
fn field_info<'py>(py: Python<'py>, field: &str) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, load_field(field_id(field)?))
}

/// Re-checks the sup-norm row of one field and returns it as a dict.
#[pyfunction]
fn verify_table<'py>(py: Python<'py>, field: &str) -> PyResult<Bound<'py, PyAny>> {
    let id = field_id(field)?;
    load_field(id);
    json_to_py(py, &analysis::verify_table(id).map_err(to_py_err)?)
}

#[pymodule]
fn normeuclid_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NormEuclidError", m.py().get_type::<NormEuclidError>())?;
    m.add("FIELDS", FieldId::ALL.iter().map(|id| id.name()).collect::<Vec<_>>())?;
    m.add_class::<PyRingElement>()?;
    m.add_function(wrap_pyfunction!(divide, m)?)?;
    m.add_function(wrap_pyfunction!(xgcd, m)?)?;
    m.add_function(wrap_pyfunction!(exact_div, m)?)?;
    m.add_function(wrap_pyfunction!(is_unit, m)?)?;
    m.add_function(wrap_pyfunction!(norm_bound, m)?)?;
    m.add_function(wrap_pyfunction!(field_info, m)?)?;
    m.add_function(wrap_pyfunction!(verify_table, m)?)?;
    Ok(())
}
