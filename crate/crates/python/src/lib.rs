//! Python module `walsh_hardness`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use walsh_hardness::eda::{self, Algorithm, EdaConfig};
use walsh_hardness::sizing::{bisect_population, BisectionConfig};
use walsh_hardness::walsh::{self, CoefficientMethod, Schema};
use walsh_hardness::{stats, BitString, Error, Estimator, MetricConfig, ProblemInstance, PseudoBoolean};

fn to_py(e: Error) -> PyErr {
    if e.is_configuration() || matches!(e, Error::Dimension { .. }) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn bits(values: Vec<u8>) -> PyResult<BitString> {
    BitString::new(values).map_err(to_py)
}

/// A benchmark problem parsed from a spec such as `"trap:12:3"`.
#[pyclass(frozen, name = "Problem")]
struct PyProblem {
    inner: ProblemInstance,
}

#[pymethods]
impl PyProblem {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self {
            inner: spec.parse().map_err(to_py)?,
        })
    }

    #[getter]
    fn spec(&self) -> String {
        self.inner.spec().to_string()
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> Option<usize> {
        self.inner.k()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn f_max(&self) -> f64 {
        self.inner.f_max()
    }

    fn evaluate(&self, x: Vec<u8>) -> PyResult<f64> {
        self.inner.evaluate(&bits(x)?).map_err(to_py)
    }

    fn global_optima(&self) -> Vec<Vec<u32>> {
        self.inner
            .global_optima()
            .iter()
            .map(|b| b.as_slice().iter().map(|&v| u32::from(v)).collect())
            .collect()
    }

    fn linkage_groups(&self) -> Vec<Vec<usize>> {
        self.inner.structure().groups.clone()
    }

    /// `((i, j), (i, j'))`: a dependent and an independent variable pair.
    fn canonical_pairs(&self) -> PyResult<((usize, usize), (usize, usize))> {
        let p = self.inner.canonical_pairs().map_err(to_py)?;
        Ok((p.dependent, p.independent))
    }

    fn __repr__(&self) -> String {
        format!("Problem('{}')", self.inner.spec())
    }
}

/// Walsh coefficients of a fitness table of length 2^n (index bit i = x_i).
#[pyfunction]
#[pyo3(signature = (table, fast = true))]
fn walsh_transform(table: Vec<f64>, fast: bool) -> PyResult<Vec<f64>> {
    let s = if fast {
        walsh::walsh_transform_fast(&table)
    } else {
        walsh::walsh_transform_naive(&table)
    };
    Ok(s.map_err(to_py)?.coeffs().to_vec())
}

/// Full Walsh spectrum of a problem by enumeration.
#[pyfunction]
fn spectrum(py: Python<'_>, problem: &PyProblem) -> PyResult<Vec<f64>> {
    let p = &problem.inner;
    py.detach(|| walsh::spectrum_of(p).map(|s| s.coeffs().to_vec())).map_err(to_py)
}

/// Mean fitness over a schema such as `"1*0"`, from the Walsh spectrum.
#[pyfunction]
fn schema_average(problem: &PyProblem, schema: &str) -> PyResult<f64> {
    let schema: Schema = schema.parse().map_err(to_py)?;
    let s = walsh::spectrum_of(&problem.inner).map_err(to_py)?;
    walsh::schema_average_exact(&s, &schema).map_err(to_py)
}

/// Coefficient of `subset` by the exact, confusion or population method.
#[pyfunction]
#[pyo3(signature = (problem, subset, method = "exact", samples = 5000, trials = 64, seed = 0))]
fn estimate_coefficient(
    problem: &PyProblem,
    subset: Vec<usize>,
    method: &str,
    samples: usize,
    trials: usize,
    seed: u64,
) -> PyResult<f64> {
    let p = &problem.inner;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = match method {
        "exact" => walsh::estimate_coefficient(p, &subset, CoefficientMethod::Exact),
        "confusion" => walsh::estimate_coefficient(p, &subset, CoefficientMethod::Confusion { trials, rng: &mut rng }),
        "population" => {
            let xs: Vec<BitString> = (0..samples).map(|_| BitString::random(p.n(), &mut rng)).collect();
            let fs: Vec<f64> = xs.iter().map(|x| p.fitness(x.as_slice())).collect();
            walsh::estimate_coefficient(
                p,
                &subset,
                CoefficientMethod::Population {
                    samples: &xs,
                    fitness: &fs,
                },
            )
        }
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    };
    r.map_err(to_py)
}

/// M1, M2, M3 and FDC as a dict; undefined metrics are `None`.
#[pyfunction]
#[pyo3(signature = (problem, samples = 5000, fraction = 0.5, reps = 50, estimator = "population", seed = 0))]
fn compute_metrics<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    samples: usize,
    fraction: f64,
    reps: usize,
    estimator: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = MetricConfig {
        sample_size: samples,
        selection_fraction: fraction,
        repetitions: reps,
        estimator: estimator.parse::<Estimator>().map_err(to_py)?,
        rng_seed: seed,
    };
    let p = &problem.inner;
    let report = py.detach(|| walsh_hardness::compute_metrics(p, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("problem", report.problem)?;
    d.set_item("m1", report.m1)?;
    d.set_item("m2", report.m2)?;
    d.set_item("m3", report.m3)?;
    d.set_item("fdc", report.fdc)?;
    d.set_item("m3_discarded", report.m3_discarded)?;
    Ok(d)
}

fn parse_algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(to_py)
}

/// One seeded ECGA or BOA run.
#[pyfunction]
#[pyo3(signature = (problem, algorithm, population_size, seed = 0, max_generations = 200))]
fn run_eda<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    algorithm: &str,
    population_size: usize,
    seed: u64,
    max_generations: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = EdaConfig {
        max_generations,
        ..EdaConfig::new(parse_algorithm(algorithm)?, population_size, seed)
    };
    let p = &problem.inner;
    let out = py.detach(|| eda::run_eda(p, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("success", out.success)?;
    d.set_item("fitness_calls", out.fitness_calls)?;
    d.set_item("generations_used", out.generations_used)?;
    d.set_item("best_fitness", out.best_fitness)?;
    d.set_item("seed", out.seed)?;
    d.set_item("population_size", out.population_size)?;
    Ok(d)
}

/// Bisection search for the smallest reliable population size.
#[pyfunction]
#[pyo3(signature = (problem, algorithm, initial = 1000, successes = 10, tolerance = 0.1, seed = 0))]
fn bisect<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    algorithm: &str,
    initial: usize,
    successes: usize,
    tolerance: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let template = EdaConfig::new(parse_algorithm(algorithm)?, initial, 0);
    let cfg = BisectionConfig::new(initial, successes, tolerance, seed);
    let p = &problem.inner;
    let r = py.detach(|| bisect_population(p, &template, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("population_size", r.population_size)?;
    d.set_item("min_bound", r.min_bound)?;
    d.set_item("max_bound", r.max_bound)?;
    d.set_item("median_fitness_calls", r.median_fitness_calls)?;
    d.set_item("reliability_runs", r.reliability_runs)?;
    Ok(d)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    stats::pearson(&xs, &ys).map_err(to_py)
}

#[pyfunction]
fn kendall_tau(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    stats::kendall_tau(&xs, &ys).map_err(to_py)
}

#[pymodule(name = "walsh_hardness")]
fn walsh_hardness_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(walsh_transform, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(schema_average, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(compute_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(run_eda, m)?)?;
    m.add_function(wrap_pyfunction!(bisect, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_tau, m)?)?;
    Ok(())
}
