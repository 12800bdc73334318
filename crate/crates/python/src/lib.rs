//! Python bindings: `import gweights`.

use gw_core::braid::{enumerate_flags, Flag, FlagJson, SubsetE};
use gw_core::fan::{check_index_condition, check_unimodular, p2_example, FanJson};
use gw_core::matroid::{catalog, MatroidJson};
use gw_core::polytope::{gp_delta_i, weight_of_polytope, GenPermutohedronJson};
use gw_core::weights::{balance_check_braid, balance_check_matroid, zero_extend, ProductEngine};
use gw_core::{classes, Domain, Fan, GenPermutohedron, LatticeVector};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(gweights, GwError, PyValueError);
create_exception!(gweights, CapExceeded, GwError);
create_exception!(gweights, NotGeneric, GwError);

fn err(e: gw_core::Error) -> PyErr {
    match e {
        gw_core::Error::CapExceeded { .. } => CapExceeded::new_err(e.to_string()),
        gw_core::Error::NotGeneric(_) => NotGeneric::new_err(e.to_string()),
        e => GwError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for gw_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Serializes to a Python object through the `json` module.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| GwError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn flag_of(n: usize, sets: Vec<Vec<usize>>) -> PyResult<Flag> {
    FlagJson(sets).resolve(n).py_err()
}

#[pyclass(name = "Matroid", module = "gweights", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMatroid(gw_core::Matroid);

#[pymethods]
impl PyMatroid {
    #[staticmethod]
    fn uniform(r: usize, n: usize) -> PyResult<Self> {
        Ok(Self(gw_core::Matroid::uniform(r, n).py_err()?.with_name(format!("U({r},{n})"))))
    }

    /// `fano`, `nonfano`, `vamos`, `k4`, `k3`, `u<r><n>`.
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        Ok(Self(catalog(name).py_err()?))
    }

    #[staticmethod]
    fn from_graph(edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self(gw_core::Matroid::from_graph(&edges).py_err()?))
    }

    #[staticmethod]
    fn from_bases(n: usize, bases: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(Self(MatroidJson::Bases { n, bases }.build().py_err()?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(MatroidJson::parse(text).py_err()?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).expect("matroid json")
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.0.name().map(str::to_string)
    }

    fn rank_of(&self, s: Vec<usize>) -> PyResult<usize> {
        Ok(self.0.rank_of(SubsetE::from_elements(self.0.n(), &s).py_err()?.bits))
    }

    fn flats(&self) -> Vec<Vec<usize>> {
        self.0.flats().into_iter().map(gw_core::braid::elements).collect()
    }

    fn bases(&self) -> Vec<Vec<usize>> {
        self.0.bases().into_iter().map(gw_core::braid::elements).collect()
    }

    fn flags_of_flats(&self) -> PyResult<Vec<Vec<Vec<usize>>>> {
        Ok(self.0.flags_of_flats().py_err()?.iter().map(|f| f.to_json()).collect())
    }

    fn char_poly(&self) -> String {
        self.0.char_poly().to_string()
    }

    fn reduced_char_poly(&self) -> PyResult<String> {
        Ok(self.0.reduced_char_poly().py_err()?.to_string())
    }

    fn beta<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let b = self.0.beta().py_err()?;
        py.import("builtins")?.getattr("int")?.call1((b.to_string(),))
    }

    fn tutte_poly(&self) -> String {
        self.0.tutte_poly().to_string()
    }

    fn rank_generating_poly(&self) -> String {
        self.0.rank_generating_poly().to_string()
    }

    fn independence_poly(&self) -> String {
        self.0.independence_poly().to_string()
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.summary())
    }

    fn __repr__(&self) -> String {
        format!("Matroid({}, n={}, rank={})", classes::label(&self.0), self.0.n(), self.0.rank())
    }
}

#[pyclass(name = "Weight", module = "gweights", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWeight(gw_core::Weight);

#[pymethods]
impl PyWeight {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(gw_core::Weight::parse(text).py_err()?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).expect("weight json")
    }

    /// The weight of `Δ_I` on the permutohedral fan of `[n]`.
    #[staticmethod]
    fn delta(n: usize, subset: Vec<usize>) -> PyResult<Self> {
        let p = gp_delta_i(n, &SubsetE::from_elements(n, &subset).py_err()?).py_err()?;
        Ok(Self(weight_of_polytope(&p).py_err()?))
    }

    /// Lattice-point weight of the generalized permutohedron with values
    /// `z = {"1,3": 2, ...}`.
    #[staticmethod]
    fn polytope(n: usize, z: std::collections::BTreeMap<String, i64>) -> PyResult<Self> {
        let p = GenPermutohedron::from_json(&GenPermutohedronJson { n, z }).py_err()?;
        Ok(Self(weight_of_polytope(&p).py_err()?))
    }

    #[staticmethod]
    fn constant(n: usize, c: i64) -> PyResult<Self> {
        Ok(Self(gw_core::Weight::constant(Domain::Braid(n), c).py_err()?))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn domain(&self) -> String {
        self.0.domain().describe()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn flags(&self) -> Vec<Vec<Vec<usize>>> {
        self.0.flags().iter().map(|f| f.to_json()).collect()
    }

    /// `(flag, value)` pairs in canonical flag order.
    fn items(&self) -> Vec<(Vec<Vec<usize>>, String)> {
        self.0.flags().iter().zip(self.0.values()).map(|(f, v)| (f.to_json(), v.to_string())).collect()
    }

    fn value(&self, flag: Vec<Vec<usize>>) -> PyResult<String> {
        let f = flag_of(self.0.n(), flag)?;
        Ok(self.0.value(&f).py_err()?.to_string())
    }

    /// Balancing report; matroid-domain weights are checked on their fan.
    fn balance<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = match self.0.domain() {
            Domain::Braid(_) => balance_check_braid(&self.0),
            Domain::Matroid(m) => balance_check_matroid(m, &self.0),
        };
        to_py(py, &r.py_err()?)
    }

    fn is_balanced(&self) -> PyResult<bool> {
        let r = match self.0.domain() {
            Domain::Braid(_) => balance_check_braid(&self.0),
            Domain::Matroid(m) => balance_check_matroid(m, &self.0),
        };
        Ok(r.py_err()?.pass)
    }

    /// Extends a matroid-domain weight by zero to the permutohedral fan.
    fn zero_extend(&self) -> PyResult<Self> {
        match self.0.domain() {
            Domain::Matroid(m) => Ok(Self(zero_extend(m, &self.0).py_err()?)),
            Domain::Braid(_) => Ok(self.clone()),
        }
    }

    #[pyo3(signature = (other, v=None))]
    fn product(&self, other: &PyWeight, v: Option<Vec<i64>>) -> PyResult<Self> {
        let v = v.map(|v| LatticeVector::from_i64(&v));
        Ok(Self(gw_core::weights::product(&self.0, &other.0, v.as_ref()).py_err()?))
    }

    fn __mul__(&self, other: &PyWeight) -> PyResult<Self> {
        self.product(other, None)
    }

    fn __eq__(&self, other: &PyWeight) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Weight({}, {} flags)", self.0.domain().describe(), self.0.len())
    }
}

/// Repeated products on one permutohedral fan.
#[pyclass(name = "ProductEngine", module = "gweights", frozen)]
struct PyProductEngine(ProductEngine);

#[pymethods]
impl PyProductEngine {
    #[new]
    #[pyo3(signature = (n, v=None))]
    fn new(n: usize, v: Option<Vec<i64>>) -> PyResult<Self> {
        let v = v.map(|v| LatticeVector::from_i64(&v));
        Ok(Self(ProductEngine::new(n, v.as_ref()).py_err()?))
    }

    fn product(&self, a: &PyWeight, b: &PyWeight) -> PyResult<PyWeight> {
        Ok(PyWeight(self.0.product(&a.0, &b.0).py_err()?))
    }
}

fn fan_report<'py>(py: Python<'py>, fan: &Fan) -> PyResult<Bound<'py, PyAny>> {
    let uni = check_unimodular(fan);
    let index = check_index_condition(fan);
    let pass = uni.pass && index.pass;
    to_py(py, &serde_json::json!({ "pass": pass, "unimodularity": uni, "index_condition": index }))
}

/// Unimodularity and index report for a fan given as JSON
/// `{rank, rays, cones, complete}`.
#[pyfunction]
fn fan_check<'py>(py: Python<'py>, fan_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let j: FanJson = serde_json::from_str(fan_json).map_err(|e| err(e.into()))?;
    fan_report(py, &Fan::from_json(&j).py_err()?)
}

#[pyfunction]
fn braid_fan_check<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    fan_report(py, &Fan::braid(n).py_err()?)
}

/// Flags of `[n]` in canonical order.
#[pyfunction]
fn braid_flags(n: usize) -> PyResult<Vec<Vec<Vec<usize>>>> {
    Ok(enumerate_flags(n).py_err()?.iter().map(|f| f.to_json()).collect())
}

#[pyfunction]
fn mcy_dual_weight(m: &PyMatroid) -> PyResult<PyWeight> {
    Ok(PyWeight(classes::mcy_dual_weight(&m.0).py_err()?))
}

#[pyfunction]
fn csm_weight(m: &PyMatroid, k: usize) -> PyResult<PyWeight> {
    Ok(PyWeight(classes::csm_weight(&m.0, k).py_err()?))
}

#[pyfunction]
fn taut_weight(m: &PyMatroid) -> PyResult<PyWeight> {
    Ok(PyWeight(classes::taut_weight(&m.0).py_err()?))
}

#[pyfunction]
fn sub_weight(m: &PyMatroid) -> PyResult<PyWeight> {
    Ok(PyWeight(classes::sub_weight(&m.0).py_err()?))
}

#[pyfunction]
fn quot_weight(m: &PyMatroid) -> PyResult<PyWeight> {
    Ok(PyWeight(classes::quot_weight(&m.0).py_err()?))
}

#[pyfunction]
#[pyo3(signature = (m, v=None))]
fn verify_tutte_identity<'py>(py: Python<'py>, m: &PyMatroid, v: Option<Vec<i64>>) -> PyResult<Bound<'py, PyAny>> {
    let v = v.map(|v| LatticeVector::from_i64(&v));
    to_py(py, &classes::verify_tutte_identity(&m.0, v.as_ref()).py_err()?)
}

#[pyfunction]
fn pointed_convolution_check<'py>(py: Python<'py>, m: &PyMatroid, i: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &classes::pointed_convolution_check(&m.0, i).py_err()?)
}

#[pyfunction]
fn psi_formula_check<'py>(py: Python<'py>, m: &PyMatroid, i: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &classes::psi_formula_check(&m.0, i).py_err()?)
}

#[pyfunction]
fn aij_symmetry_check<'py>(py: Python<'py>, m: &PyMatroid, i: usize, j: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &classes::aij_symmetry_check(&m.0, i, j).py_err()?)
}

#[pyfunction]
fn a_ij(m: &PyMatroid, i: usize, j: usize) -> PyResult<String> {
    Ok(classes::a_ij(&m.0, i, j).py_err()?.to_string())
}

#[pyfunction]
fn csm_balancing_check<'py>(py: Python<'py>, m: &PyMatroid, k: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &classes::csm_balancing_check(&m.0, k).py_err()?)
}

#[pyfunction(name = "p2_example")]
fn p2<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &p2_example().py_err()?)
}

#[pymodule]
fn gweights(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("GwError", py.get_type::<GwError>())?;
    m.add("CapExceeded", py.get_type::<CapExceeded>())?;
    m.add("NotGeneric", py.get_type::<NotGeneric>())?;
    m.add_class::<PyMatroid>()?;
    m.add_class::<PyWeight>()?;
    m.add_class::<PyProductEngine>()?;
    m.add_function(wrap_pyfunction!(fan_check, m)?)?;
    m.add_function(wrap_pyfunction!(braid_fan_check, m)?)?;
    m.add_function(wrap_pyfunction!(braid_flags, m)?)?;
    m.add_function(wrap_pyfunction!(mcy_dual_weight, m)?)?;
    m.add_function(wrap_pyfunction!(csm_weight, m)?)?;
    m.add_function(wrap_pyfunction!(taut_weight, m)?)?;
    m.add_function(wrap_pyfunction!(sub_weight, m)?)?;
    m.add_function(wrap_pyfunction!(quot_weight, m)?)?;
    m.add_function(wrap_pyfunction!(verify_tutte_identity, m)?)?;
    m.add_function(wrap_pyfunction!(pointed_convolution_check, m)?)?;
    m.add_function(wrap_pyfunction!(psi_formula_check, m)?)?;
    m.add_function(wrap_pyfunction!(aij_symmetry_check, m)?)?;
    m.add_function(wrap_pyfunction!(a_ij, m)?)?;
    m.add_function(wrap_pyfunction!(csm_balancing_check, m)?)?;
    m.add_function(wrap_pyfunction!(p2, m)?)?;
    Ok(())
}
