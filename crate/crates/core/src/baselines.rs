//! Comparator solvers: projected SGD, stochastic proximal point with
//! alternating projections, and Pegasos.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_positive, Result, SascError};
use crate::linalg::{axpy, dist, norm};
use crate::problem::CompositeProblem;
use crate::problems::LabeledSparseDataset;
use crate::sasc::validation_seed;
use crate::smoothing::{CertificateInputs, ValidationSet};
use crate::trace::{ConvergenceTrace, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Sgd,
    Spp,
    Pegasos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    /// SGD base step, SPP's fixed step, or Pegasos' regularization weight.
    pub step: f64,
    pub iterations: u64,
    pub seed: u64,
    pub checkpoint_every: u64,
    pub validation_samples: usize,
    pub timing: bool,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod, step: f64, iterations: u64, seed: u64) -> Self {
        BaselineConfig {
            method,
            step,
            iterations,
            seed,
            checkpoint_every: 1000,
            validation_samples: 1000,
            timing: true,
        }
    }

    fn validate(&self) -> Result<()> {
        ensure_positive(self.step, "step")?;
        if self.iterations < 1 || self.checkpoint_every < 1 || self.validation_samples < 1 {
            return Err(SascError::Config(
                "iterations, checkpoint_every and validation_samples must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    /// Averaged iterate for SGD, last iterate for SPP and Pegasos.
    pub x: Vec<f64>,
    pub trace: ConvergenceTrace,
}

struct Recorder<'a> {
    problem: &'a CompositeProblem,
    validation: ValidationSet<'a>,
    cert: Option<&'a CertificateInputs>,
    clock: Instant,
    timing: bool,
    trace: ConvergenceTrace,
}

impl<'a> Recorder<'a> {
    fn new(
        problem: &'a CompositeProblem,
        cfg: &BaselineConfig,
        cert: Option<&'a CertificateInputs>,
    ) -> Self {
        Recorder {
            problem,
            validation: ValidationSet::new(
                problem.constraints.as_ref(),
                cfg.validation_samples,
                validation_seed(cfg.seed),
            ),
            cert,
            clock: Instant::now(),
            timing: cfg.timing,
            trace: ConvergenceTrace::new(),
        }
    }

    fn record(&mut self, x: &[f64], samples: u64, alpha: f64) {
        self.trace.push(TraceRecord {
            samples,
            epoch: 0,
            objective: self.problem.objective(x),
            feasibility: self.validation.feasibility(x),
            beta: 0.0,
            alpha,
            dist_to_ref: self.cert.map(|c| dist(x, &c.x_star)),
            wall_time: if self.timing {
                self.clock.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
    }
}

/// `x <- P_K(x - (step / sqrt(t)) grad f(x, xi))`, where `K` is the set whose
/// indicator is `h`. Returns the running average.
pub fn run_projected_sgd(
    problem: &CompositeProblem,
    cfg: &BaselineConfig,
    cert: Option<&CertificateInputs>,
) -> Result<BaselineRun> {
    cfg.validate()?;
    let set = problem.nonsmooth.as_projector().ok_or_else(|| {
        SascError::Unsupported(
            "projected SGD needs h to be zero or the indicator of a projectable set".into(),
        )
    })?;
    let d = problem.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rec = Recorder::new(problem, cfg, cert);
    let mut x = vec![0.0; d];
    set.project_in_place(&mut x);
    let mut avg = vec![0.0; d];
    let mut g = vec![0.0; d];
    for t in 1..=cfg.iterations {
        let eta = cfg.step / (t as f64).sqrt();
        problem.smooth.sample_gradient(&x, &mut rng, &mut g);
        axpy(-eta, &g, &mut x);
        set.project_in_place(&mut x);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SascError::Divergence { epoch: 0, step: t });
        }
        let w = 1.0 / t as f64;
        avg.iter_mut().zip(&x).for_each(|(a, v)| *a += w * (v - *a));
        if t % cfg.checkpoint_every == 0 || t == cfg.iterations {
            rec.record(&avg, t, eta);
        }
    }
    Ok(BaselineRun {
        x: avg,
        trace: rec.trace,
    })
}

/// Stochastic proximal point with alternating projections at fixed step `mu`:
/// `x <- P_{C(xi')}(prox_{mu h}(prox_{mu f(., xi)}(x)))`, where
/// `C(xi') = {x : A(xi') x in b(xi')}`. Returns the last iterate.
pub fn run_spp(
    problem: &CompositeProblem,
    cfg: &BaselineConfig,
    cert: Option<&CertificateInputs>,
) -> Result<BaselineRun> {
    cfg.validate()?;
    let mu = cfg.step;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rec = Recorder::new(problem, cfg, cert);
    let mut x = vec![0.0; problem.dim];
    for t in 1..=cfg.iterations {
        let z = problem
            .smooth
            .sample_prox(&x, mu, &mut rng)
            .ok_or_else(|| {
                SascError::Unsupported("objective samples have no closed-form prox".into())
            })?;
        let z = if problem.nonsmooth.is_zero() {
            z
        } else {
            problem.nonsmooth.evaluate(&z, mu)?
        };
        let c = problem.constraints.draw(&mut rng);
        x = c.project_onto_feasible(&z)?;
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SascError::Divergence { epoch: 0, step: t });
        }
        if t % cfg.checkpoint_every == 0 || t == cfg.iterations {
            rec.record(&x, t, mu);
        }
    }
    Ok(BaselineRun {
        x,
        trace: rec.trace,
    })
}

/// Result of a Pegasos run.
#[derive(Debug, Clone)]
pub struct PegasosRun {
    pub x: Vec<f64>,
    /// `(iteration, held-out 0/1 error)` at each checkpoint.
    pub test_error: Vec<(u64, f64)>,
    /// Primal objective `lambda/2 ||x||^2 + mean hinge` in the objective
    /// column and root-mean-square hard-margin violation
    /// `sqrt(mean max(0, 1 - b_i <a_i, x>)^2 / ||a_i||^2)` in the feasibility column.
    pub trace: ConvergenceTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PegasosConfig {
    pub lambda: f64,
    pub iterations: u64,
    pub seed: u64,
    pub checkpoint_every: u64,
    /// Project onto the ball of radius `1/sqrt(lambda)` after each step.
    pub project: bool,
    pub timing: bool,
}

impl PegasosConfig {
    pub fn new(lambda: f64, iterations: u64, seed: u64) -> Self {
        PegasosConfig {
            lambda,
            iterations,
            seed,
            checkpoint_every: 1000,
            project: false,
            timing: true,
        }
    }
}

fn hinge_stats(ds: &LabeledSparseDataset, x: &[f64]) -> (f64, f64) {
    let mut hinge = 0.0;
    let mut viol = 0.0;
    for (r, &b) in ds.rows.iter().zip(&ds.labels) {
        let gap = (1.0 - b * r.dot(x)).max(0.0);
        hinge += gap;
        let n2: f64 = r.values.iter().map(|v| v * v).sum();
        if n2 > 0.0 {
            viol += gap * gap / n2;
        }
    }
    let n = ds.len().max(1) as f64;
    (hinge / n, (viol / n).sqrt())
}

/// `x <- (1 - 1/t) x + (1/(lambda t)) 1[b <a, x> < 1] b a` with a uniformly
/// drawn training row.
pub fn run_pegasos(
    train: &LabeledSparseDataset,
    test: Option<&LabeledSparseDataset>,
    cfg: &PegasosConfig,
) -> Result<PegasosRun> {
    ensure_positive(cfg.lambda, "lambda")?;
    if cfg.iterations < 1 || cfg.checkpoint_every < 1 {
        return Err(SascError::Config(
            "iterations and checkpoint_every must be at least 1".into(),
        ));
    }
    train.check_labels()?;
    if let Some(t) = test {
        t.check_labels()?;
        if t.dim > train.dim {
            return Err(SascError::Shape {
                expected: train.dim,
                got: t.dim,
            });
        }
    }
    if train.is_empty() {
        return Err(SascError::InsufficientData("empty training set".into()));
    }
    let eval = test.unwrap_or(train);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let clock = Instant::now();
    let radius = 1.0 / cfg.lambda.sqrt();
    let mut x = vec![0.0; train.dim];
    let mut trace = ConvergenceTrace::new();
    let mut test_error = Vec::new();
    for t in 1..=cfg.iterations {
        let i = rng.random_range(0..train.len());
        let (row, b) = (&train.rows[i], train.labels[i]);
        let eta = 1.0 / (cfg.lambda * t as f64);
        let active = b * row.dot(&x) < 1.0;
        let shrink = 1.0 - eta * cfg.lambda;
        x.iter_mut().for_each(|v| *v *= shrink);
        if active {
            for (&j, v) in row.indices.iter().zip(&row.values) {
                x[j] += eta * b * v;
            }
        }
        if cfg.project {
            let nx = norm(&x);
            if nx > radius {
                x.iter_mut().for_each(|v| *v *= radius / nx);
            }
        }
        if t % cfg.checkpoint_every == 0 || t == cfg.iterations {
            let (hinge, viol) = hinge_stats(train, &x);
            let nx = norm(&x);
            trace.push(TraceRecord {
                samples: t,
                epoch: 0,
                objective: 0.5 * cfg.lambda * nx * nx + hinge,
                feasibility: viol,
                beta: 0.0,
                alpha: eta,
                dist_to_ref: None,
                wall_time: if cfg.timing {
                    clock.elapsed().as_secs_f64()
                } else {
                    0.0
                },
            });
            test_error.push((t, eval.error_rate(&x)));
        }
    }
    Ok(PegasosRun {
        x,
        test_error,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ConstraintSample, FiniteConstraints, LinearMap, QuadraticTerm, ZeroTerm};
    use crate::problems::{
        gen_basis_pursuit, gen_separable_svm, make_bp_least_squares_problem, SparseRow,
    };
    use crate::prox::{ProxHandle, SetProjector};
    use std::sync::Arc;

    fn row_source(a: Vec<f64>, b: f64) -> Arc<FiniteConstraints> {
        let d = a.len();
        Arc::new(
            FiniteConstraints::new(
                d,
                vec![ConstraintSample::new(LinearMap::Row(a), SetProjector::singleton(b)).unwrap()],
            )
            .unwrap(),
        )
    }

    #[test]
    fn sgd_without_gradient_stays_put() {
        let p = CompositeProblem::new(
            2,
            Arc::new(ZeroTerm),
            ProxHandle::Zero,
            row_source(vec![1.0, 0.0], 1.0),
            1.0,
        )
        .unwrap();
        let run = run_projected_sgd(
            &p,
            &BaselineConfig::new(BaselineMethod::Sgd, 1.0, 100, 0),
            None,
        )
        .unwrap();
        assert_eq!(run.x, vec![0.0, 0.0]);
    }

    #[test]
    fn sgd_finds_center_of_quadratic() {
        let q = QuadraticTerm {
            center: vec![1.0, 2.0],
            curvature: 1.0,
            noise: 0.5,
        };
        let p = CompositeProblem::new(
            2,
            Arc::new(q),
            ProxHandle::Zero,
            row_source(vec![1.0, 0.0], 1.0),
            1.0,
        )
        .unwrap();
        let mut cfg = BaselineConfig::new(BaselineMethod::Sgd, 1.0, 200_000, 3);
        cfg.validation_samples = 1;
        let run = run_projected_sgd(&p, &cfg, None).unwrap();
        assert!(dist(&run.x, &[1.0, 2.0]) < 1e-2, "{:?}", run.x);
    }

    #[test]
    fn sgd_rejects_l1() {
        let p = CompositeProblem::new(
            2,
            Arc::new(ZeroTerm),
            ProxHandle::l1(),
            row_source(vec![1.0, 0.0], 1.0),
            1.0,
        )
        .unwrap();
        let e = run_projected_sgd(
            &p,
            &BaselineConfig::new(BaselineMethod::Sgd, 1.0, 10, 0),
            None,
        )
        .unwrap_err();
        assert!(matches!(e, SascError::Unsupported(_)));
    }

    #[test]
    fn sgd_least_squares_is_dense() {
        let inst = gen_basis_pursuit(50, 2000, 5, 0.9, 1).unwrap();
        let p = make_bp_least_squares_problem(&inst).unwrap();
        let mut cfg = BaselineConfig::new(BaselineMethod::Sgd, 1.0, 20_000, 1);
        cfg.checkpoint_every = 5000;
        cfg.validation_samples = 200;
        let run = run_projected_sgd(&p, &cfg, None).unwrap();
        let nnz = run.x.iter().filter(|v| v.abs() > 1e-6).count();
        assert!(nnz > 10, "nnz = {nnz}");
    }

    #[test]
    fn spp_hyperplane_step() {
        let p = CompositeProblem::new(
            2,
            Arc::new(ZeroTerm),
            ProxHandle::Zero,
            row_source(vec![1.0, 0.0], 1.0),
            1.0,
        )
        .unwrap();
        let mut cfg = BaselineConfig::new(BaselineMethod::Spp, 1e-3, 1, 0);
        cfg.validation_samples = 1;
        assert_eq!(run_spp(&p, &cfg, None).unwrap().x, vec![1.0, 0.0]);
        // Already feasible: further iterations leave the point unchanged.
        cfg.iterations = 50;
        assert_eq!(run_spp(&p, &cfg, None).unwrap().x, vec![1.0, 0.0]);
    }

    #[test]
    fn spp_satisfies_last_drawn_constraint() {
        let inst = gen_basis_pursuit(10, 50, 3, 0.5, 2).unwrap();
        let p = crate::problems::make_bp_problem(&inst).unwrap();
        let support = p.constraints.support().unwrap();
        let mut cfg = BaselineConfig::new(BaselineMethod::Spp, 1e-2, 1, 0);
        cfg.validation_samples = 50;
        for iters in 1..40 {
            cfg.iterations = iters;
            let run = run_spp(&p, &cfg, None).unwrap();
            let best = support
                .iter()
                .map(|s| s.dist_sq(&run.x).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-12);
        }
    }

    #[test]
    fn pegasos_first_step() {
        let ds = LabeledSparseDataset::new(vec![SparseRow::from_dense(&[1.0, 0.0])], vec![1.0], 2)
            .unwrap();
        let run = run_pegasos(&ds, None, &PegasosConfig::new(1.0, 1, 0)).unwrap();
        assert_eq!(run.x, vec![1.0, 0.0]);
    }

    #[test]
    fn pegasos_shrinks_when_margin_met() {
        // After step 1, x = [2, 0] has margin 2 >= 1, so step 2 halves it.
        let ds = LabeledSparseDataset::new(vec![SparseRow::from_dense(&[1.0, 0.0])], vec![1.0], 2)
            .unwrap();
        let run = run_pegasos(&ds, None, &PegasosConfig::new(0.5, 2, 0)).unwrap();
        assert_eq!(run.x, vec![1.0, 0.0]);
    }

    #[test]
    fn pegasos_rejects_bad_label() {
        let ds =
            LabeledSparseDataset::new(vec![SparseRow::from_dense(&[1.0])], vec![2.0], 1).unwrap();
        assert_eq!(
            run_pegasos(&ds, None, &PegasosConfig::new(1.0, 1, 0)).unwrap_err(),
            SascError::InvalidLabel { row: 0, label: 2.0 }
        );
    }

    #[test]
    fn pegasos_separable_toy() {
        let (ds, _) = gen_separable_svm(2, 200, 0.2, 5).unwrap();
        let run = run_pegasos(&ds, None, &PegasosConfig::new(1.0 / 200.0, 10_000, 1)).unwrap();
        assert_eq!(ds.error_rate(&run.x), 0.0);
        assert_eq!(run.test_error.last().unwrap().1, 0.0);
    }

    #[test]
    fn pegasos_norm_bounds() {
        let (ds, _) = gen_separable_svm(5, 300, 0.0, 6).unwrap();
        let r = ds.rows.iter().map(|r| r.norm()).fold(0.0, f64::max);
        for lambda in [0.01, 0.1, 1.0] {
            for project in [false, true] {
                let cfg = PegasosConfig {
                    checkpoint_every: 1,
                    project,
                    ..PegasosConfig::new(lambda, 500, 7)
                };
                let mut x_norms = Vec::new();
                // Replay checkpoints by rerunning with growing iteration counts.
                for it in [1u64, 2, 10, 100, 500] {
                    let run = run_pegasos(
                        &ds,
                        None,
                        &PegasosConfig {
                            iterations: it,
                            ..cfg.clone()
                        },
                    )
                    .unwrap();
                    x_norms.push(norm(&run.x));
                }
                let bound = if project {
                    1.0 / lambda.sqrt()
                } else {
                    r / lambda
                };
                assert!(
                    x_norms.iter().all(|&n| n <= bound * (1.0 + 1e-12)),
                    "{lambda} {project} {x_norms:?}"
                );
            }
        }
    }

    #[test]
    fn baselines_are_deterministic() {
        let inst = gen_basis_pursuit(10, 100, 3, 0.5, 2).unwrap();
        let p = crate::problems::make_bp_problem(&inst).unwrap();
        let mut cfg = BaselineConfig::new(BaselineMethod::Spp, 1e-2, 500, 4);
        cfg.timing = false;
        cfg.checkpoint_every = 50;
        let a = run_spp(&p, &cfg, None).unwrap();
        let b = run_spp(&p, &cfg, None).unwrap();
        assert_eq!(a.trace, b.trace);
        let ls = make_bp_least_squares_problem(&inst).unwrap();
        let a = run_projected_sgd(&ls, &cfg, None).unwrap();
        let b = run_projected_sgd(&ls, &cfg, None).unwrap();
        assert_eq!(a.trace, b.trace);
    }
}
