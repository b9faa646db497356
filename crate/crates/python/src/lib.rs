//! Python bindings for the `sasc` solver library.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sasc::baselines::{run_pegasos, run_spp, BaselineConfig, BaselineMethod, PegasosConfig};
use sasc::io;
use sasc::problems::{self as gen, BasisPursuitInstance, LabeledSparseDataset};
use sasc::prox::{self, SetProjector};
use sasc::sasc::{self as solver, Budget, Case, RateConstants, SascConfig};
use sasc::smoothing::{moreau_grad, CertificateInputs};
use sasc::trace::ConvergenceTrace;
use sasc::SascError;

fn to_py(e: SascError) -> PyErr {
    match e {
        SascError::Divergence { .. }
        | SascError::NoConvergence { .. }
        | SascError::Numeric(_)
        | SascError::Io { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_case(case: u8) -> PyResult<Case> {
    match case {
        1 => Ok(Case::GeneralConvex),
        2 => Ok(Case::RestrictedStronglyConvex),
        _ => Err(PyValueError::new_err(format!(
            "case must be 1 or 2, got {case}"
        ))),
    }
}

/// Column-oriented view of a convergence trace.
#[pyclass(name = "Trace", frozen)]
struct PyTrace {
    inner: ConvergenceTrace,
}

#[pymethods]
impl PyTrace {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn samples(&self) -> Vec<u64> {
        self.inner.records.iter().map(|r| r.samples).collect()
    }

    #[getter]
    fn epoch(&self) -> Vec<usize> {
        self.inner.records.iter().map(|r| r.epoch).collect()
    }

    #[getter]
    fn objective(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.objective).collect()
    }

    #[getter]
    fn feasibility(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.feasibility).collect()
    }

    #[getter]
    fn dist_to_ref(&self) -> Vec<Option<f64>> {
        self.inner.records.iter().map(|r| r.dist_to_ref).collect()
    }

    /// Least-squares slope of log feasibility against log samples.
    #[pyo3(signature = (min_samples = 1000))]
    fn feasibility_slope(&self, min_samples: u64) -> Option<f64> {
        self.inner.feasibility_slope(min_samples)
    }

    fn to_csv(&self, path: PathBuf) -> PyResult<()> {
        io::write_trace_csv(&self.inner, &path).map_err(to_py)
    }

    #[staticmethod]
    fn from_csv(path: PathBuf) -> PyResult<Self> {
        io::read_trace_csv(&path)
            .map(|inner| PyTrace { inner })
            .map_err(to_py)
    }
}

/// Projection onto a closed convex set.
#[pyclass(name = "SetProjector", frozen)]
struct PySet {
    inner: SetProjector,
}

#[pymethods]
impl PySet {
    #[staticmethod]
    fn singleton(b: f64) -> Self {
        PySet {
            inner: SetProjector::singleton(b),
        }
    }

    #[staticmethod]
    fn interval(lo: f64, hi: f64) -> PyResult<Self> {
        Ok(PySet {
            inner: SetProjector::interval(lo, hi).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn halfline(lo: f64) -> Self {
        PySet {
            inner: SetProjector::halfline(lo),
        }
    }

    #[staticmethod]
    fn hyperplane(normal: Vec<f64>, offset: f64) -> PyResult<Self> {
        Ok(PySet {
            inner: SetProjector::hyperplane(normal, offset).map_err(to_py)?,
        })
    }

    fn project(&self, z: Vec<f64>) -> Vec<f64> {
        self.inner.project(&z)
    }

    fn dist(&self, z: Vec<f64>) -> f64 {
        self.inner.dist(&z)
    }

    /// Value and gradient of `dist(z)^2 / (2 beta)`.
    fn moreau_grad(&self, z: Vec<f64>, beta: f64) -> PyResult<(f64, Vec<f64>)> {
        moreau_grad(&z, &self.inner, beta).map_err(to_py)
    }
}

#[pyfunction]
fn soft_threshold(z: Vec<f64>, tau: f64) -> PyResult<Vec<f64>> {
    prox::soft_threshold(&z, tau).map_err(to_py)
}

#[pyfunction]
fn project_hyperplane(z: Vec<f64>, a: Vec<f64>, b: f64) -> PyResult<Vec<f64>> {
    prox::project_hyperplane(&z, &a, b).map_err(to_py)
}

/// A generated sparse-recovery instance.
#[pyclass(name = "BasisPursuit", frozen)]
struct PyBasisPursuit {
    inner: BasisPursuitInstance,
}

#[pymethods]
impl PyBasisPursuit {
    #[new]
    #[pyo3(signature = (d = 50, n = 20_000, sparsity = 5, rho = 0.9, seed = 0))]
    fn new(d: usize, n: usize, sparsity: usize, rho: f64, seed: u64) -> PyResult<Self> {
        Ok(PyBasisPursuit {
            inner: gen::gen_basis_pursuit(d, n, sparsity, rho, seed).map_err(to_py)?,
        })
    }

    #[getter]
    fn x_star(&self) -> Vec<f64> {
        self.inner.x_star.clone()
    }

    #[getter]
    fn auto_alpha0(&self) -> f64 {
        self.inner.auto_alpha0()
    }

    /// Runs SASC (general convex schedule). Returns `(x_bar, trace)`.
    #[pyo3(signature = (passes = 2.0, alpha0 = None, omega = 2.0, m0 = 2, seed = 0, checkpoint_every = 1000))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        passes: f64,
        alpha0: Option<f64>,
        omega: f64,
        m0: u64,
        seed: u64,
        checkpoint_every: u64,
    ) -> PyResult<(Vec<f64>, PyTrace)> {
        let problem = gen::make_bp_problem(&self.inner).map_err(to_py)?;
        let n = self.inner.rows.len() as f64;
        let cfg = SascConfig {
            alpha0: alpha0.unwrap_or_else(|| self.inner.auto_alpha0()),
            omega,
            m0,
            budget: Budget::Samples((passes * n).round() as u64),
            seed,
            checkpoint_every,
            timing: false,
            ..SascConfig::default()
        };
        let cert =
            CertificateInputs::new(self.inner.x_star.clone(), 0.0, 0.0, 0.0).map_err(to_py)?;
        let run = py
            .detach(|| solver::run_sasc(&problem, &cfg, Some(&cert)))
            .map_err(to_py)?;
        Ok((run.x_bar, PyTrace { inner: run.trace }))
    }

    /// Fixed-step stochastic proximal point. Returns `(x, trace)`.
    #[pyo3(signature = (iterations, step = 1e-3, seed = 0, checkpoint_every = 1000))]
    fn solve_spp(
        &self,
        iterations: u64,
        step: f64,
        seed: u64,
        checkpoint_every: u64,
    ) -> PyResult<(Vec<f64>, PyTrace)> {
        let problem = gen::make_bp_problem(&self.inner).map_err(to_py)?;
        let cfg = BaselineConfig {
            checkpoint_every,
            timing: false,
            ..BaselineConfig::new(BaselineMethod::Spp, step, iterations, seed)
        };
        let run = run_spp(&problem, &cfg, None).map_err(to_py)?;
        Ok((run.x, PyTrace { inner: run.trace }))
    }
}

/// Final iterate, `(iteration, test error)` pairs and the trace.
type PegasosOutput = (Vec<f64>, Vec<(u64, f64)>, PyTrace);

/// A labeled sparse dataset in libsvm layout.
#[pyclass(name = "Dataset", frozen)]
struct PyDataset {
    inner: LabeledSparseDataset,
}

#[pymethods]
impl PyDataset {
    #[staticmethod]
    #[pyo3(signature = (path, dim = None))]
    fn from_libsvm(path: PathBuf, dim: Option<usize>) -> PyResult<Self> {
        Ok(PyDataset {
            inner: io::parse_libsvm(&path, dim).map_err(to_py)?,
        })
    }

    /// Separable Gaussian points labeled by a planted unit separator.
    #[staticmethod]
    #[pyo3(signature = (d, n, margin = 0.5, seed = 0))]
    fn separable(d: usize, n: usize, margin: f64, seed: u64) -> PyResult<Self> {
        Ok(PyDataset {
            inner: gen::gen_separable_svm(d, n, margin, seed).map_err(to_py)?.0,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn labels(&self) -> Vec<f64> {
        self.inner.labels.clone()
    }

    fn to_libsvm(&self) -> String {
        io::to_libsvm_string(&self.inner)
    }

    fn error_rate(&self, x: Vec<f64>) -> f64 {
        self.inner.error_rate(&x)
    }

    /// Hard-margin SVM by SASC with the strongly convex schedule.
    /// Returns `(x_bar, trace)`.
    #[pyo3(signature = (samples = 200_000, alpha0 = 0.5, omega = 2.0, m0 = 4, seed = 0, checkpoint_every = 1000))]
    #[allow(clippy::too_many_arguments)]
    fn solve_svm(
        &self,
        py: Python<'_>,
        samples: u64,
        alpha0: f64,
        omega: f64,
        m0: u64,
        seed: u64,
        checkpoint_every: u64,
    ) -> PyResult<(Vec<f64>, PyTrace)> {
        let problem = gen::make_svm_problem(&self.inner).map_err(to_py)?;
        let cfg = SascConfig {
            alpha0,
            omega,
            m0,
            case: Case::RestrictedStronglyConvex,
            budget: Budget::Samples(samples),
            seed,
            checkpoint_every,
            timing: false,
            ..SascConfig::default()
        };
        let run = py
            .detach(|| solver::run_sasc(&problem, &cfg, None))
            .map_err(to_py)?;
        Ok((run.x_bar, PyTrace { inner: run.trace }))
    }

    /// Pegasos on this training set. Returns `(x, test_error, trace)`.
    #[pyo3(signature = (lam, iterations, seed = 0, test = None, project = false, checkpoint_every = 1000))]
    fn pegasos(
        &self,
        lam: f64,
        iterations: u64,
        seed: u64,
        test: Option<PyRef<'_, PyDataset>>,
        project: bool,
        checkpoint_every: u64,
    ) -> PyResult<PegasosOutput> {
        let cfg = PegasosConfig {
            checkpoint_every,
            project,
            timing: false,
            ..PegasosConfig::new(lam, iterations, seed)
        };
        let run = run_pegasos(&self.inner, test.as_ref().map(|t| &t.inner), &cfg).map_err(to_py)?;
        Ok((run.x, run.test_error, PyTrace { inner: run.trace }))
    }
}

/// Worst slack of each step-size schedule inequality up to epoch `smax`.
#[pyfunction]
#[pyo3(signature = (case, m0, omega, alpha0, smax = 40, norm_bound = 1.0, lipschitz = None))]
fn schedule_check(
    case: u8,
    m0: u64,
    omega: f64,
    alpha0: f64,
    smax: usize,
    norm_bound: f64,
    lipschitz: Option<f64>,
) -> PyResult<BTreeMap<String, f64>> {
    let case = parse_case(case)?;
    let cfg = SascConfig {
        alpha0,
        omega,
        m0,
        case,
        ..SascConfig::default()
    };
    let report = solver::schedule_inequalities_check(
        case,
        &cfg,
        norm_bound,
        lipschitz.unwrap_or(0.75 / alpha0),
        smax,
    )
    .map_err(to_py)?;
    Ok(report
        .entries
        .iter()
        .map(|e| (e.name.to_string(), e.worst))
        .collect())
}

/// Rate constants (`C1..C4` or `D1..D3`) for a schedule and reference data.
#[pyfunction]
#[pyo3(signature = (case, m0, omega, alpha0, norm_bound = 1.0, initial_distance = 0.0, y_star_norm = 0.0, sigma_f = 0.0))]
#[allow(clippy::too_many_arguments)]
fn rate_constants(
    case: u8,
    m0: u64,
    omega: f64,
    alpha0: f64,
    norm_bound: f64,
    initial_distance: f64,
    y_star_norm: f64,
    sigma_f: f64,
) -> PyResult<BTreeMap<String, f64>> {
    let case = parse_case(case)?;
    let cfg = SascConfig {
        alpha0,
        omega,
        m0,
        case,
        ..SascConfig::default()
    };
    let cert =
        CertificateInputs::new(vec![initial_distance], 0.0, y_star_norm, sigma_f).map_err(to_py)?;
    let c = match case {
        Case::GeneralConvex => RateConstants::Case1(
            solver::constants_case1(&cfg, norm_bound, &cert, &[0.0]).map_err(to_py)?,
        ),
        Case::RestrictedStronglyConvex => RateConstants::Case2(
            solver::constants_case2(&cfg, norm_bound, &cert, &[0.0]).map_err(to_py)?,
        ),
    };
    let pairs = match c {
        RateConstants::Case1(c) => vec![("C1", c.c1), ("C2", c.c2), ("C3", c.c3), ("C4", c.c4)],
        RateConstants::Case2(d) => vec![("D1", d.d1), ("D2", d.d2), ("D3", d.d3)],
    };
    Ok(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

#[pymodule]
fn sasc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrace>()?;
    m.add_class::<PySet>()?;
    m.add_class::<PyBasisPursuit>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(project_hyperplane, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_check, m)?)?;
    m.add_function(wrap_pyfunction!(rate_constants, m)?)?;
    Ok(())
}
