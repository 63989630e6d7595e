//! Python bindings for the wittlab exact engine.
//!
//! Rationals cross the boundary as `"p/q"` strings so no precision is lost;
//! `fractions.Fraction(s)` converts them on the Python side.

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

use wittlab::cechain::{self, WittChain};
use wittlab::cyclic::{self, ChernCocycle};
use wittlab::exactalg::{fmt_q, parse_q, Rational};
use wittlab::grr;
use wittlab::jouanolou::JElement;
use wittlab::report;
use wittlab::wittlie::{Algebra, VectorField};

fn rational(s: &str) -> PyResult<Rational> {
    parse_q(s).ok_or_else(|| PyValueError::new_err(format!("not a rational: {s:?}")))
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn check_axis(d: usize, i: usize) -> PyResult<()> {
    if i < d {
        Ok(())
    } else {
        Err(PyIndexError::new_err(format!("axis {i} out of range for dimension {d}")))
    }
}

/// An element of the Jouanolou algebra.
#[pyclass(name = "JElement", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyJElement(JElement);

#[pymethods]
impl PyJElement {
    /// The unit in dimension `d`.
    #[staticmethod]
    fn one(d: usize) -> Self {
        PyJElement(JElement::one(d))
    }

    /// The coordinate `z^{i+1}`.
    #[staticmethod]
    fn z(d: usize, i: usize) -> PyResult<Self> {
        check_axis(d, i)?;
        Ok(PyJElement(JElement::z(d, i)))
    }

    /// The dual coordinate `x^{i+1}`.
    #[staticmethod]
    fn x(d: usize, i: usize) -> PyResult<Self> {
        check_axis(d, i)?;
        Ok(PyJElement(JElement::x(d, i)))
    }

    /// The odd generator `P` (dimension two).
    #[staticmethod]
    fn p() -> Self {
        PyJElement(JElement::p(2))
    }

    /// The holomorphic differential `dz^{i+1}`.
    #[staticmethod]
    fn dz(d: usize, i: usize) -> PyResult<Self> {
        check_axis(d, i)?;
        Ok(PyJElement(JElement::dz(d, i)))
    }

    fn __add__(&self, o: &Self) -> Self {
        PyJElement(self.0.add(&o.0))
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyJElement(self.0.sub(&o.0))
    }

    fn __mul__(&self, o: &Self) -> Self {
        PyJElement(self.0.mul(&o.0))
    }

    /// Multiply by a rational given as text.
    fn scale(&self, c: &str) -> PyResult<Self> {
        Ok(PyJElement(self.0.scale(&rational(c)?)))
    }

    fn pow(&self, n: u32) -> Self {
        PyJElement(self.0.pow(n))
    }

    fn dbar(&self) -> Self {
        PyJElement(self.0.dbar())
    }

    fn partial(&self, i: usize) -> PyResult<Self> {
        self.0.try_partial(i).map(PyJElement).map_err(value_err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The residue of a top-degree form.
    fn residue(&self) -> String {
        fmt_q(&self.0.residue())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("JElement({})", self.0)
    }
}

/// A vector field of the dg Witt algebra.
#[pyclass(name = "VectorField", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyVectorField(VectorField);

#[pymethods]
impl PyVectorField {
    /// The field `f ∂_{axis+1}`.
    #[staticmethod]
    fn along(axis: usize, f: &PyJElement) -> PyResult<Self> {
        check_axis(f.0.dim(), axis)?;
        Ok(PyVectorField(VectorField::along(axis, f.0.clone())))
    }

    fn __add__(&self, o: &Self) -> Self {
        PyVectorField(self.0.add(&o.0))
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyVectorField(self.0.sub(&o.0))
    }

    /// The graded bracket.
    fn bracket(&self, o: &Self) -> Self {
        PyVectorField(self.0.bracket(&o.0))
    }

    fn dbar(&self) -> Self {
        PyVectorField(self.0.dbar())
    }

    fn divergence(&self) -> PyJElement {
        PyJElement(self.0.divergence())
    }

    /// The action on a function.
    fn act(&self, f: &PyJElement) -> PyJElement {
        PyJElement(self.0.act(&f.0))
    }

    /// Components, one per axis.
    fn components(&self) -> Vec<PyJElement> {
        self.0.comps().iter().cloned().map(PyJElement).collect()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = self.0.comps().iter().map(|c| c.to_string()).collect();
        format!("VectorField([{}])", parts.join(", "))
    }
}

/// A Chevalley–Eilenberg chain of the dg Witt algebra in dimension two.
#[pyclass(name = "WittChain", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyWittChain(WittChain);

#[pymethods]
impl PyWittChain {
    /// The closed chain `X`.
    #[staticmethod]
    fn x() -> Self {
        PyWittChain(cechain::x_chain())
    }

    /// The closed chain `X̃`.
    #[staticmethod]
    fn x_tilde() -> Self {
        PyWittChain(cechain::x_tilde_chain())
    }

    /// The wedge `X₁ ∧ X₂ ∧ X₃` of family `i` (0 = I, …, 3 = IV).
    #[staticmethod]
    fn family(i: usize) -> PyResult<Self> {
        if i >= 4 {
            return Err(PyIndexError::new_err("families are numbered 0..=3"));
        }
        Ok(PyWittChain(cechain::family_chain(i)))
    }

    /// The total differential `∂̄ + d^Lie`.
    fn total_boundary(&self) -> Self {
        PyWittChain(cechain::total_boundary(&self.0))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __len__(&self) -> usize {
        self.0.terms.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// A universal Chern cocycle `ch₁^{a₁} ch₂^{a₂} …`.
#[pyclass(name = "ChernCocycle", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyChernCocycle(ChernCocycle);

#[pymethods]
impl PyChernCocycle {
    /// The cocycle with the given exponents in dimension `d`, unnormalized.
    #[new]
    fn new(d: usize, exponents: Vec<usize>) -> PyResult<Self> {
        cyclic::chern_cocycle(d, &exponents).map(PyChernCocycle).map_err(value_err)
    }

    /// The same cocycle rescaled so that it takes `value` on `chain`.
    fn calibrated(&self, chain: &PyWittChain, value: &str) -> PyResult<Self> {
        self.0
            .calibrated(&chain.0, &rational(value)?)
            .map(PyChernCocycle)
            .ok_or_else(|| PyValueError::new_err("the cocycle vanishes on the calibration chain"))
    }

    /// The pairing with a chain.
    fn pair(&self, chain: &PyWittChain) -> String {
        fmt_q(&self.0.pair(&chain.0))
    }

    /// The unnormalized value on `d + 1` fields.
    fn eval_raw(&self, fields: Vec<PyRef<'_, PyVectorField>>) -> PyResult<String> {
        let fs: Vec<VectorField> = fields.iter().map(|f| f.0.clone()).collect();
        self.0.eval_raw(&fs).map(|v| fmt_q(&v)).map_err(value_err)
    }
}

/// `ch₁³` and `ch₁ch₂` calibrated on `X` to −12 and 12.
#[pyfunction]
fn calibrated_chern_pair() -> (PyChernCocycle, PyChernCocycle) {
    let (a, b) = report::calibrated_chern_pair();
    (PyChernCocycle(a), PyChernCocycle(b))
}

/// The circle integral of an `n`-cycle.
#[pyfunction]
fn cycle_integral(n: usize) -> PyResult<String> {
    grr::cycle_integral(n).map(|v| fmt_q(&v)).map_err(value_err)
}

/// The Todd class truncation in rank `d`, as text.
#[pyfunction]
fn todd_truncation(d: usize) -> PyResult<String> {
    grr::todd_truncation(d).map(|t| t.to_string()).map_err(value_err)
}

/// The one-loop trace of a chain.
#[pyfunction]
fn one_loop_pair(chain: &PyWittChain) -> String {
    fmt_q(&grr::one_loop_pair(&chain.0))
}

/// Homology dimension of `L_k` (`algebra = "L1"`, …) or `w2` (`"W2"`) at a
/// scaling weight.
#[pyfunction]
fn homology_dim(algebra: &str, weight: i64, degree: usize) -> PyResult<usize> {
    let alg = match algebra {
        "W2" => Algebra::W2,
        s => match s.strip_prefix('L').and_then(|k| k.parse().ok()) {
            Some(k) => Algebra::L(k),
            None => return Err(PyValueError::new_err(format!("unknown algebra {s:?}"))),
        },
    };
    Ok(cechain::homology_dim_scaling(alg, weight, degree))
}

/// Identifiers of the verification suites.
#[pyfunction]
fn suites() -> Vec<&'static str> {
    report::SUITES.to_vec()
}

/// Run suites and return the JSON report.
#[pyfunction]
#[pyo3(signature = (ids, max_weight = 5, stretch = false))]
fn run_suites(py: Python<'_>, ids: Vec<String>, max_weight: i64, stretch: bool) -> PyResult<String> {
    let cfg = report::Config { max_weight, stretch, cache: None };
    let results = py.detach(|| report::run_all(&ids, &cfg)).map_err(value_err)?;
    Ok(report::report_json(&results))
}

#[pymodule]
#[pyo3(name = "wittlab")]
pub fn wittlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyJElement>()?;
    m.add_class::<PyVectorField>()?;
    m.add_class::<PyWittChain>()?;
    m.add_class::<PyChernCocycle>()?;
    m.add_function(wrap_pyfunction!(calibrated_chern_pair, m)?)?;
    m.add_function(wrap_pyfunction!(cycle_integral, m)?)?;
    m.add_function(wrap_pyfunction!(todd_truncation, m)?)?;
    m.add_function(wrap_pyfunction!(one_loop_pair, m)?)?;
    m.add_function(wrap_pyfunction!(homology_dim, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(run_suites, m)?)?;
    Ok(())
}
