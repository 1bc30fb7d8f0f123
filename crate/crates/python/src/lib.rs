//! Python bindings: abelian groups, cohomology computations and the
//! closed-form predictors.

use std::collections::BTreeMap;

use gammacoh::cohomology::{self, CohomologyResult};
use gammacoh::divided;
use gammacoh::sl2;
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: gammacoh::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finitely generated abelian group `Z^r + Z/d1 + ... + Z/dk`, `d1 | d2 | ...`.
#[pyclass(
    name = "AbelianGroup",
    module = "gammacoh",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq, Eq)]
pub struct PyAbelianGroup(pub gammacoh::AbelianGroup);

#[pymethods]
impl PyAbelianGroup {
    #[new]
    #[pyo3(signature = (free_rank = 0, orders = Vec::new()))]
    fn new(free_rank: usize, orders: Vec<BigInt>) -> PyResult<Self> {
        if orders.iter().any(|d| d.sign() != num_bigint::Sign::Plus) {
            return Err(PyValueError::new_err("cyclic orders must be positive"));
        }
        Ok(PyAbelianGroup(gammacoh::AbelianGroup::from_cyclic_orders(
            free_rank, orders,
        )))
    }

    /// Parses text such as `"Z^3 + Z/2 + Z/4"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyAbelianGroup).map_err(err)
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.0.free_rank()
    }

    #[getter]
    fn invariant_factors(&self) -> Vec<BigInt> {
        self.0.invariant_factors().to_vec()
    }

    fn torsion(&self) -> Self {
        PyAbelianGroup(self.0.torsion())
    }

    fn is_trivial(&self) -> bool {
        self.0.is_trivial()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("AbelianGroup.parse('{}')", self.0)
    }
}

fn groups(r: CohomologyResult) -> BTreeMap<usize, PyAbelianGroup> {
    r.groups
        .into_iter()
        .map(|(k, g)| (k, PyAbelianGroup(g)))
        .collect()
}

/// `{0: H^0, 1: H^1}` of `Gamma(m)` with coefficients in `M_n`.
#[pyfunction]
fn gamma_cohomology(m: u64, n: usize) -> PyResult<BTreeMap<usize, PyAbelianGroup>> {
    cohomology::gamma_cohomology(m, n).map(groups).map_err(err)
}

/// `H^0, H^1, H^2` of `B_Gamma(m)`.
#[pyfunction]
fn b_gamma_cohomology(m: u64, n: usize) -> PyResult<BTreeMap<usize, PyAbelianGroup>> {
    cohomology::b_gamma_cohomology(m, n)
        .map(groups)
        .map_err(err)
}

/// `H^k(Gamma(2); M_n)` for `k <= max_k`.
#[pyfunction]
fn gamma2_cohomology(n: usize, max_k: usize) -> PyResult<BTreeMap<usize, PyAbelianGroup>> {
    cohomology::gamma2_cohomology(n, max_k)
        .map(groups)
        .map_err(err)
}

#[pyfunction]
fn uct_check(m: u64, n: usize, p: u64, a: u32) -> PyResult<bool> {
    cohomology::uct_check(m, n, p, a).map_err(err)
}

#[pyfunction]
fn steinberg_check(m: u64, p: u64, a: u32, b: u32, n: usize) -> PyResult<bool> {
    cohomology::steinberg_check(m, p, a, b, n).map_err(err)
}

/// Predicted torsion of `H^1(Gamma(m); M_n)`, for one prime or summed over `primes`.
#[pyfunction]
#[pyo3(signature = (m, n, p = None, primes = vec![2, 3, 5, 7]))]
fn predict_h1_torsion(
    m: u64,
    n: u64,
    p: Option<u64>,
    primes: Vec<u64>,
) -> PyResult<PyAbelianGroup> {
    let g = match p {
        Some(p) => divided::predict_h1_torsion(m, n, p).map(|t| t.to_group()),
        None => divided::predict_h1_torsion_total(m, n, &primes),
    };
    g.map(PyAbelianGroup).map_err(err)
}

/// Rank of `H^1(Gamma(m); M_n (x) Q)` for `m >= 3`.
#[pyfunction]
fn h1_rank(m: u64, n: u64) -> PyResult<u64> {
    divided::closed_form_ranks(m)
        .map(|c| c.h1_rank(n))
        .map_err(err)
}

#[pyfunction]
fn sl2_free_rank_series(max_degree: usize) -> Vec<i64> {
    divided::sl2_free_rank_series(max_degree)
}

#[pyfunction]
fn verify_delta_presentation(p: u64, a: u32, max_degree: u64) -> PyResult<bool> {
    divided::verify_delta_presentation(p, a, max_degree).map_err(err)
}

/// `|SL(2, Z/m)|` from the closed formula.
#[pyfunction]
fn group_order(m: u64) -> u64 {
    sl2::group_order(m)
}

/// `|SL(2, Z/m)|` by breadth-first enumeration.
#[pyfunction]
fn enumerated_order(m: u64) -> PyResult<usize> {
    sl2::enumerate_group(m).map(|v| v.len()).map_err(err)
}

#[pymodule]
#[pyo3(name = "gammacoh")]
fn gammacoh_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAbelianGroup>()?;
    m.add_function(wrap_pyfunction!(gamma_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(b_gamma_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(gamma2_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(uct_check, m)?)?;
    m.add_function(wrap_pyfunction!(steinberg_check, m)?)?;
    m.add_function(wrap_pyfunction!(predict_h1_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(h1_rank, m)?)?;
    m.add_function(wrap_pyfunction!(sl2_free_rank_series, m)?)?;
    m.add_function(wrap_pyfunction!(verify_delta_presentation, m)?)?;
    m.add_function(wrap_pyfunction!(group_order, m)?)?;
    m.add_function(wrap_pyfunction!(enumerated_order, m)?)?;
    Ok(())
}
