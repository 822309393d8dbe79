//! Python bindings. Structured results come back as plain dicts and lists.

use std::path::PathBuf;

use mcfin_core::cex;
use mcfin_core::modeng::{self, PRSSystem};
use mcfin_core::oeisio;
use mcfin_core::oracle::{self, PartitionConstraint, RelationKind, SpecialPlacement};
use mcfin_core::seqcore;
use mcfin_core::witness::{self, ReportOptions};
use num_bigint::{BigInt, BigUint};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(mcfin, McfinError, PyException, "Raised for any library error.");

fn err(e: mcfin_core::Error) -> PyErr {
    McfinError::new_err(e.to_string())
}

/// Converts a serialisable value through the stdlib json module.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| McfinError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "SequenceSpec", module = "mcfin", frozen)]
struct PySequenceSpec {
    inner: mcfin_core::SequenceSpec,
}

#[pymethods]
impl PySequenceSpec {
    #[new]
    #[pyo3(signature = (family, r = 0, k = None, sizes = None, residue_class = None))]
    fn new(family: &str, r: u64, k: Option<u64>, sizes: Option<&str>, residue_class: Option<(u64, u64)>) -> PyResult<Self> {
        let mut spec = mcfin_core::SequenceSpec::new(family.parse().map_err(err)?).with_r(r);
        if let Some(k) = k {
            spec = spec.with_k(k);
        }
        if let Some(s) = sizes {
            spec = spec.with_sizes(s.parse().map_err(err)?);
        }
        if let Some((c, m)) = residue_class {
            spec = spec.with_residue_class(c, m);
        }
        spec.validate().map_err(err)?;
        Ok(PySequenceSpec { inner: spec })
    }

    /// Parses CLI-style flags such as `"--family bell --r 2"`.
    #[staticmethod]
    fn from_flags(text: &str) -> PyResult<Self> {
        Ok(PySequenceSpec {
            inner: oeisio::spec_from_flags(text).map_err(err)?,
        })
    }

    fn value(&self, n: u64) -> PyResult<BigInt> {
        seqcore::eval_exact(&self.inner, n).map_err(err)
    }

    /// Values at `0..=n_max`.
    fn values(&self, n_max: u64) -> PyResult<Vec<BigInt>> {
        seqcore::eval_exact_range(&self.inner, n_max).map_err(err)
    }

    fn residues(&self, modulus: u64, n_max: u64) -> PyResult<Vec<u64>> {
        Ok(modeng::eval_mod(&self.inner, modulus, n_max).map_err(err)?.values)
    }

    #[pyo3(signature = (modulus, n_max = 500, max_order = 24, min_margin = 16))]
    fn recurrence_mod<'py>(
        &self,
        py: Python<'py>,
        modulus: u64,
        n_max: u64,
        max_order: usize,
        min_margin: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let trace = modeng::eval_mod(&self.inner, modulus, n_max).map_err(err)?;
        let w = witness::find_recurrence_mod(&trace, max_order, min_margin).map_err(err)?;
        to_py(py, &w)
    }

    /// Eventual period modulo `modulus`, backed by a recurrence when one is found.
    #[pyo3(signature = (modulus, n_max = 500, max_order = 24, min_margin = 16))]
    fn period_mod<'py>(
        &self,
        py: Python<'py>,
        modulus: u64,
        n_max: u64,
        max_order: usize,
        min_margin: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let trace = modeng::eval_mod(&self.inner, modulus, n_max).map_err(err)?;
        let rec = witness::find_recurrence_mod(&trace, max_order, min_margin).map_err(err)?;
        let per = witness::period_witness(&trace, rec.as_ref()).map_err(err)?;
        to_py(py, &per)
    }

    #[pyo3(signature = (moduli, n_max = 2000, max_order = 24, min_margin = 16, cfinite_max_order = 16, exact_n_max = 200))]
    fn report<'py>(
        &self,
        py: Python<'py>,
        moduli: Vec<u64>,
        n_max: u64,
        max_order: usize,
        min_margin: usize,
        cfinite_max_order: usize,
        exact_n_max: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = ReportOptions {
            max_order,
            min_margin,
            cfinite_max_order,
            exact_n_max,
        };
        let entries = py
            .detach(|| witness::mc_report(&self.inner, &moduli, n_max, &opts))
            .map_err(err)?;
        to_py(py, &entries)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SequenceSpec({:?})", self.inner.to_string())
    }
}

#[pyclass(name = "SizeSet", module = "mcfin", frozen)]
struct PySizeSet {
    inner: mcfin_core::SizeSet,
}

#[pymethods]
impl PySizeSet {
    #[new]
    fn new(grammar: &str) -> PyResult<Self> {
        Ok(PySizeSet {
            inner: grammar.parse().map_err(err)?,
        })
    }

    fn __contains__(&self, n: u64) -> bool {
        self.inner.contains(n)
    }

    fn members_up_to(&self, n: u64) -> Vec<u64> {
        self.inner.members_up_to(n).collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner.same_membership(&other.inner)
    }
}

#[pyclass(name = "PRSSystem", module = "mcfin", frozen)]
struct PyPRSSystem {
    inner: PRSSystem,
}

#[pymethods]
impl PyPRSSystem {
    /// Parses lines `x1' = ...`, `init: a1, ...` and an optional `output: i`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyPRSSystem {
            inner: PRSSystem::parse(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn a086714() -> Self {
        PyPRSSystem {
            inner: PRSSystem::a086714(),
        }
    }

    #[staticmethod]
    fn fibonacci() -> Self {
        PyPRSSystem {
            inner: PRSSystem::fibonacci(),
        }
    }

    fn exact(&self, n_max: u64) -> PyResult<Vec<BigInt>> {
        self.inner.output_exact(n_max).map_err(err)
    }

    fn trace(&self, modulus: u64, n_max: u64) -> PyResult<Vec<u64>> {
        Ok(modeng::prs_trace(&self.inner, modulus, n_max).map_err(err)?.values)
    }

    /// `(q, p)` of the state sequence modulo `modulus`.
    fn cycle(&self, modulus: u64) -> PyResult<(u64, u64)> {
        modeng::brent_cycle(&self.inner, modulus).map_err(err)
    }

    #[pyo3(signature = (modulus, q, p, extra = 3))]
    fn verify_cycle(&self, modulus: u64, q: u64, p: u64, extra: u64) -> PyResult<bool> {
        modeng::verify_cycle(&self.inner, modulus, q, p, extra).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyfunction]
#[pyo3(signature = (n, r = 0, sizes = None, blocks = None, internal_order = None, external_order = false, non_crossing = false, non_overlapping = false))]
#[allow(clippy::too_many_arguments)]
fn count_partitions(
    n: u64,
    r: u64,
    sizes: Option<&str>,
    blocks: Option<u64>,
    internal_order: Option<&str>,
    external_order: bool,
    non_crossing: bool,
    non_overlapping: bool,
) -> PyResult<BigInt> {
    let mut c = PartitionConstraint::new(n).with_r(r);
    if let Some(s) = sizes {
        c = c.with_sizes(s.parse().map_err(err)?);
    }
    if let Some(b) = blocks {
        c = c.with_blocks(b);
    }
    match internal_order {
        None => {}
        Some("free") => c = c.internally_ordered(SpecialPlacement::Free),
        Some("head") => c = c.internally_ordered(SpecialPlacement::Head),
        Some(other) => {
            return Err(McfinError::new_err(format!(
                "internal_order must be 'free' or 'head', got {other:?}"
            )))
        }
    }
    if external_order {
        c = c.externally_ordered();
    }
    if non_crossing {
        c = c.non_crossing();
    }
    if non_overlapping {
        c = c.non_overlapping();
    }
    oracle::count_partitions(&c).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, kind, allow_slow = false))]
fn count_relations(py: Python<'_>, n: u64, kind: &str, allow_slow: bool) -> PyResult<BigInt> {
    let kind: RelationKind = kind.parse().map_err(err)?;
    py.detach(|| oracle::count_relations(n, kind, allow_slow)).map_err(err)
}

#[pyfunction]
fn count_e_r_structures(n: u64, r: u64) -> PyResult<BigInt> {
    oracle::count_e_r_structures(n, r).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (values, max_order = 16))]
fn find_integer_recurrence<'py>(py: Python<'py>, values: Vec<BigInt>, max_order: usize) -> PyResult<Bound<'py, PyAny>> {
    let w = witness::find_integer_recurrence(&values, max_order).map_err(err)?;
    to_py(py, &w)
}

#[pyfunction]
fn growth_refutation<'py>(py: Python<'py>, values: Vec<BigInt>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &witness::growth_refutation(&values).map_err(err)?)
}

/// Parities of the orbit of `a -> binom(a, 2)` started at `start`, as a 0/1 string.
#[pyfunction]
#[pyo3(signature = (count, start = None))]
fn beta_bits(count: u64, start: Option<BigUint>) -> String {
    let start = start.unwrap_or_else(|| BigUint::from(cex::A086714_START));
    cex::bits_to_string(&cex::beta_bits(&start, count))
}

#[pyfunction]
fn phi(k: u32, r: u64) -> PyResult<String> {
    Ok(cex::bits_to_string(&cex::phi(k, r).map_err(err)?))
}

#[pyfunction]
fn verify_phi_bijection<'py>(py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cex::verify_phi_bijection(k).map_err(err)?)
}

#[pyfunction]
fn refute_period<'py>(py: Python<'py>, start: u64, period: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cex::refute_period(start, period).map_err(err)?)
}

/// `[(index, value)]` of a b-file.
#[pyfunction]
fn parse_bfile(text: &str) -> PyResult<Vec<(i64, BigInt)>> {
    Ok(oeisio::parse_bfile(text).map_err(err)?.entries)
}

#[pyfunction]
fn crosscheck_fixture<'py>(py: Python<'py>, fixtures: PathBuf, a_number: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &oeisio::crosscheck_fixture(&fixtures, a_number).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "mcfin")]
fn mcfin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("McfinError", m.py().get_type::<McfinError>())?;
    m.add_class::<PySequenceSpec>()?;
    m.add_class::<PySizeSet>()?;
    m.add_class::<PyPRSSystem>()?;
    m.add_function(wrap_pyfunction!(count_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(count_relations, m)?)?;
    m.add_function(wrap_pyfunction!(count_e_r_structures, m)?)?;
    m.add_function(wrap_pyfunction!(find_integer_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(growth_refutation, m)?)?;
    m.add_function(wrap_pyfunction!(beta_bits, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(verify_phi_bijection, m)?)?;
    m.add_function(wrap_pyfunction!(refute_period, m)?)?;
    m.add_function(wrap_pyfunction!(parse_bfile, m)?)?;
    m.add_function(wrap_pyfunction!(crosscheck_fixture, m)?)?;
    Ok(())
}
