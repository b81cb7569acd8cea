//! Python bindings for raydiv.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use raydiv_core::gc::{run_sweep, GcConfig};
use raydiv_core::{self as core, DiscreteDistribution, Error, Generator, WeightedSequence};

pyo3::create_exception!(raydiv, AbsoluteContinuityError, PyValueError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::AbsoluteContinuityViolated { .. } => AbsoluteContinuityError::new_err(err.to_string()),
        Error::Io(_) => PyRuntimeError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A finite discrete probability distribution on the real line.
#[pyclass(name = "Distribution", module = "raydiv", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyDistribution {
    inner: DiscreteDistribution,
}

#[pymethods]
impl PyDistribution {
    #[new]
    fn new(atoms: Vec<f64>, weights: Vec<f64>) -> PyResult<Self> {
        let inner = DiscreteDistribution::new(&atoms, &weights).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Weights placed on atoms 1..n.
    #[staticmethod]
    fn from_weights(weights: Vec<f64>) -> PyResult<Self> {
        let atoms: Vec<f64> = (1..=weights.len()).map(|k| k as f64).collect();
        Self::new(atoms, weights)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = DiscreteDistribution::from_json_str(text).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn atoms(&self) -> Vec<f64> {
        self.inner.atoms().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn mass_at(&self, atom: f64) -> f64 {
        self.inner.mass_at(atom)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Distribution(atoms={:?}, weights={:?})", self.inner.atoms(), self.inner.weights())
    }
}

/// A convex generator f with f(1) = 0.
#[pyclass(name = "Generator", module = "raydiv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGenerator {
    inner: Generator,
}

#[pymethods]
impl PyGenerator {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Generator::by_name(name).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn catalogue() -> Vec<String> {
        Generator::catalogue().iter().map(|g| g.name().to_string()).collect()
    }

    #[staticmethod]
    fn combine(a: f64, f: GenArg<'_>, b: f64, g: GenArg<'_>) -> PyResult<Self> {
        Ok(Self {
            inner: Generator::combine(a, &f.resolve()?, b, &g.resolve()?),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    /// f(t) + c (t - 1).
    fn affine_shift(&self, c: f64) -> Self {
        Self {
            inner: self.inner.affine_shift(c),
        }
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    fn __repr__(&self) -> String {
        format!("Generator({:?})", self.inner.name())
    }
}

#[derive(FromPyObject)]
enum GenArg<'py> {
    Name(String),
    Object(PyRef<'py, PyGenerator>),
}

impl GenArg<'_> {
    fn resolve(&self) -> PyResult<Generator> {
        match self {
            GenArg::Name(name) => Generator::by_name(name).map_err(to_py),
            GenArg::Object(g) => Ok(g.inner.clone()),
        }
    }
}

type CheckRow = (String, &'static str, f64, f64, bool);

fn wrap(inner: DiscreteDistribution) -> PyDistribution {
    PyDistribution { inner }
}

/// Plain f-divergence D_f(mu || nu).
#[pyfunction]
fn divergence(generator: GenArg<'_>, mu: &PyDistribution, nu: &PyDistribution) -> PyResult<f64> {
    let f = generator.resolve()?;
    Ok(core::divergence(&f, &mu.inner, &nu.inner).map_err(to_py)?.value)
}

/// f-divergence over rays, computed from the antitonic projection of dmu/dnu.
#[pyfunction]
fn divergence_over_rays(generator: GenArg<'_>, mu: &PyDistribution, nu: &PyDistribution) -> PyResult<f64> {
    let f = generator.resolve()?;
    Ok(core::divergence_over_rays(&f, &mu.inner, &nu.inner).map_err(to_py)?.value)
}

#[pyfunction]
fn symmetrized_over_rays(generator: GenArg<'_>, mu: &PyDistribution, nu: &PyDistribution) -> PyResult<f64> {
    let f = generator.resolve()?;
    Ok(core::symmetrized_over_rays(&f, &mu.inner, &nu.inner).map_err(to_py)?.value)
}

/// Divergence between the bin masses of a partition with right-closed bins.
#[pyfunction]
fn partition_divergence(
    generator: GenArg<'_>,
    mu: &PyDistribution,
    nu: &PyDistribution,
    edges: Vec<f64>,
) -> PyResult<f64> {
    let f = generator.resolve()?;
    Ok(core::partition_divergence(&f, &mu.inner, &nu.inner, &edges).map_err(to_py)?.value)
}

/// sup over rays (-inf, x] of mu - nu, with the maximizing atom (None for the empty ray).
#[pyfunction]
fn ray_supremum(mu: &PyDistribution, nu: &PyDistribution) -> (f64, Option<f64>) {
    let sup = core::ray_supremum(&mu.inner, &nu.inner);
    (sup.value, sup.argmax_atom)
}

#[pyfunction]
fn ks_two_sided(mu: &PyDistribution, nu: &PyDistribution) -> f64 {
    core::ks_two_sided(&mu.inner, &nu.inner)
}

/// Residual |D_tv^R - sup_rays(mu - nu)|.
#[pyfunction]
fn ks_identity_residual(mu: &PyDistribution, nu: &PyDistribution) -> PyResult<f64> {
    Ok(core::certify_ks_identity(&mu.inner, &nu.inner).map_err(to_py)?.residual)
}

/// Weighted L2 projection onto nonincreasing sequences.
#[pyfunction]
fn project_antitonic(values: Vec<f64>, weights: Vec<f64>) -> PyResult<Vec<f64>> {
    let seq = WeightedSequence::new(values, weights).map_err(to_py)?;
    Ok(core::project_antitonic(&seq).fitted)
}

#[pyfunction]
fn projected_measure(mu: &PyDistribution, nu: &PyDistribution) -> PyResult<PyDistribution> {
    core::projected_measure(&mu.inner, &nu.inner).map(wrap).map_err(to_py)
}

/// (eta, tau, permutation) with eta/tau nonincreasing and the same divergence over rays
/// as the plain divergence of (mu, nu).
#[pyfunction]
fn rearrangement_pair(
    mu: &PyDistribution,
    nu: &PyDistribution,
) -> PyResult<(PyDistribution, PyDistribution, Vec<usize>)> {
    let pair = core::rearrangement_pair(&mu.inner, &nu.inner).map_err(to_py)?;
    Ok((wrap(pair.eta), wrap(pair.tau), pair.permutation))
}

/// Every inequality between divergences over rays, as (family, name, lhs, rhs, holds).
#[pyfunction]
fn check_inequalities(
    mu: &PyDistribution,
    nu: &PyDistribution,
) -> PyResult<Vec<CheckRow>> {
    let report = core::check_inequalities(&mu.inner, &nu.inner).map_err(to_py)?;
    Ok(report
        .checks
        .into_iter()
        .map(|c| (c.family.to_string(), c.name, c.lhs, c.rhs, c.holds))
        .collect())
}

/// Seeded Glivenko-Cantelli sweep; one dict per (generator, sample size).
#[pyfunction]
#[pyo3(signature = (nu, sizes, trials, generators, seed=42))]
fn gc_sweep<'py>(
    py: Python<'py>,
    nu: &PyDistribution,
    sizes: Vec<usize>,
    trials: usize,
    generators: Vec<String>,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let generators = generators
        .iter()
        .map(|g| Generator::by_name(g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    let config = GcConfig {
        target: nu.inner.clone(),
        sample_sizes: sizes,
        trials,
        generators,
        seed,
    };
    let trace = py.detach(|| run_sweep(&config)).map_err(to_py)?;
    trace
        .rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            d.set_item("generator", &row.generator)?;
            d.set_item("n", row.n)?;
            d.set_item("forward_median", row.forward.median)?;
            d.set_item("forward_max", row.forward.max)?;
            d.set_item("reverse_median", row.reverse.map(|s| s.median))?;
            d.set_item("symmetrized_median", row.symmetrized.map(|s| s.median))?;
            d.set_item("reverse_defined_fraction", row.reverse_defined_fraction)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn raydiv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add("AbsoluteContinuityError", m.py().get_type::<AbsoluteContinuityError>())?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyGenerator>()?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_over_rays, m)?)?;
    m.add_function(wrap_pyfunction!(symmetrized_over_rays, m)?)?;
    m.add_function(wrap_pyfunction!(partition_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(ray_supremum, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sided, m)?)?;
    m.add_function(wrap_pyfunction!(ks_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(project_antitonic, m)?)?;
    m.add_function(wrap_pyfunction!(projected_measure, m)?)?;
    m.add_function(wrap_pyfunction!(rearrangement_pair, m)?)?;
    m.add_function(wrap_pyfunction!(check_inequalities, m)?)?;
    m.add_function(wrap_pyfunction!(gc_sweep, m)?)?;
    Ok(())
}
