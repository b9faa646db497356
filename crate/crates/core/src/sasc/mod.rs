//! Stochastic approximation with smoothed constraints: epochs of proximal
//! stochastic gradient steps on `F(x) + h(x) + E[dist(A x, b)^2] / (2 beta_s)`
//! with `beta_s` shrinking geometrically between epochs.

pub mod bounds;
pub mod schedule;

use std::borrow::Cow;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SascError};
use crate::linalg::{axpy, dist};
use crate::problem::{CompositeProblem, ConstraintSample};
use crate::smoothing::{CertificateInputs, ValidationSet};
use crate::trace::{ConvergenceTrace, TraceRecord};

pub use bounds::{
    bound_curves, constants_case1, constants_case2, BoundPoint, Case1Constants, Case2Constants,
    RateConstants,
};
pub use schedule::{
    epoch_length, epoch_step, schedule_inequalities_check, schedule_params, EpochParams,
    InequalityReport, InequalitySlack,
};

/// Which step-size decay and restart rule to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `alpha_s = alpha0 omega^{-s/2}`, restart from the last inner iterate.
    GeneralConvex,
    /// `alpha_s = alpha0 omega^{-s}`, restart from the epoch average.
    RestrictedStronglyConvex,
}

impl std::str::FromStr for Case {
    type Err = SascError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "general" | "general-convex" => Ok(Case::GeneralConvex),
            "2" | "strong" | "restricted-strongly-convex" => Ok(Case::RestrictedStronglyConvex),
            other => Err(SascError::Config(format!(
                "unknown case '{other}' (expected 1 or 2)"
            ))),
        }
    }
}

/// How long to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Exactly this many epochs.
    Epochs(usize),
    /// Every epoch that fits entirely within this many samples.
    Samples(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SascConfig {
    pub alpha0: f64,
    pub omega: f64,
    pub m0: u64,
    pub case: Case,
    pub budget: Budget,
    pub seed: u64,
    /// Constraint and gradient samples averaged per inner step.
    pub minibatch: usize,
    /// Inner steps between trace records; epoch ends are always recorded.
    pub checkpoint_every: u64,
    /// Held-out constraint draws for the feasibility column. A finite support
    /// of exactly this size is evaluated exactly.
    pub validation_samples: usize,
    pub initial: Option<Vec<f64>>,
    /// Record wall time; off gives bit-reproducible traces.
    pub timing: bool,
}

impl Default for SascConfig {
    fn default() -> Self {
        SascConfig {
            alpha0: 1.0,
            omega: 2.0,
            m0: 2,
            case: Case::GeneralConvex,
            budget: Budget::Epochs(10),
            seed: 0,
            minibatch: 1,
            checkpoint_every: 1000,
            validation_samples: 1000,
            initial: None,
            timing: true,
        }
    }
}

impl SascConfig {
    pub fn validate(&self, problem: &CompositeProblem) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(SascError::Config(format!(
                "alpha0 must be positive, got {}",
                self.alpha0
            )));
        }
        if !(self.omega > 1.0 && self.omega.is_finite()) {
            return Err(SascError::Config(format!(
                "omega must exceed 1, got {}",
                self.omega
            )));
        }
        if self.m0 < 1 {
            return Err(SascError::Config("m0 must be at least 1".into()));
        }
        if self.minibatch < 1 {
            return Err(SascError::Config("minibatch must be at least 1".into()));
        }
        if self.checkpoint_every < 1 {
            return Err(SascError::Config(
                "checkpoint_every must be at least 1".into(),
            ));
        }
        if self.validation_samples < 1 {
            return Err(SascError::Config(
                "validation_samples must be at least 1".into(),
            ));
        }
        let lip = problem.lipschitz_grad();
        if lip > 0.0 && self.alpha0 > 0.75 / lip * (1.0 + 1e-12) {
            return Err(SascError::Config(format!(
                "alpha0 = {} exceeds 3/(4L) = {} for the gradient Lipschitz constant L = {lip}",
                self.alpha0,
                0.75 / lip
            )));
        }
        if self.case == Case::RestrictedStronglyConvex {
            schedule::check_case2(self.m0, self.omega, self.alpha0, problem.mu)?;
        }
        if let Some(v) = &self.initial {
            if v.len() != problem.dim {
                return Err(SascError::Config(format!(
                    "initial point has dimension {} but the problem has {}",
                    v.len(),
                    problem.dim
                )));
            }
        }
        Ok(())
    }

    /// Number of epochs the budget allows.
    pub fn epoch_count(&self) -> Result<usize> {
        match self.budget {
            Budget::Epochs(s) if s >= 1 => Ok(s),
            Budget::Epochs(_) => Err(SascError::Config("need at least one epoch".into())),
            Budget::Samples(b) => {
                let per_step = self.minibatch.max(1) as f64;
                let mut used = 0.0;
                let mut s = 0usize;
                loop {
                    used += epoch_length(self.m0, self.omega, s) * per_step;
                    if used > b as f64 {
                        break;
                    }
                    s += 1;
                }
                if s == 0 {
                    return Err(SascError::Config(format!(
                        "budget of {b} samples is smaller than the first epoch ({} samples)",
                        self.m0 as f64 * per_step
                    )));
                }
                Ok(s)
            }
        }
    }
}

/// One inner step: `prox_{alpha h}(x - alpha D)` with
/// `D = grad_f + mean_i A_i^T (A_i x - P_{b_i}(A_i x)) / beta`.
pub fn sasc_inner_step(
    problem: &CompositeProblem,
    x: &[f64],
    constraints: &[&ConstraintSample],
    grad_f: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if x.len() != problem.dim {
        return Err(SascError::Shape {
            expected: problem.dim,
            got: x.len(),
        });
    }
    if grad_f.len() != problem.dim {
        return Err(SascError::Shape {
            expected: problem.dim,
            got: grad_f.len(),
        });
    }
    if constraints.is_empty() {
        return Err(SascError::InvalidInput(
            "need at least one constraint sample".into(),
        ));
    }
    for c in constraints {
        if c.map.input_dim() != problem.dim {
            return Err(SascError::Shape {
                expected: problem.dim,
                got: c.map.input_dim(),
            });
        }
    }
    let mut d = grad_f.to_vec();
    let w = 1.0 / constraints.len() as f64;
    for c in constraints {
        c.add_penalty_gradient(x, beta, w, &mut d);
    }
    let mut z = x.to_vec();
    axpy(-alpha, &d, &mut z);
    problem.nonsmooth.evaluate(&z, alpha)
}

/// State at the end of one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSummary {
    pub epoch: usize,
    pub params: EpochParams,
    pub start: Vec<f64>,
    pub last: Vec<f64>,
    pub average: Vec<f64>,
    pub samples_seen: u64,
}

#[derive(Debug, Clone)]
pub struct SascRun {
    /// Average of the final epoch.
    pub x_bar: Vec<f64>,
    pub trace: ConvergenceTrace,
    pub epochs: Vec<EpochSummary>,
}

/// Seed of the held-out feasibility draws for a run seeded with `seed`.
pub fn validation_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Runs the double loop. With `cert`, the trace records the distance of each
/// checkpoint to `cert.x_star`.
pub fn run_sasc(
    problem: &CompositeProblem,
    cfg: &SascConfig,
    cert: Option<&CertificateInputs>,
) -> Result<SascRun> {
    cfg.validate(problem)?;
    if let Some(c) = cert {
        if c.x_star.len() != problem.dim {
            return Err(SascError::Shape {
                expected: problem.dim,
                got: c.x_star.len(),
            });
        }
    }
    let epochs = cfg.epoch_count()?;
    let dim = problem.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let validation = ValidationSet::new(
        problem.constraints.as_ref(),
        cfg.validation_samples,
        validation_seed(cfg.seed),
    );
    let clock = Instant::now();

    let mut x = cfg.initial.clone().unwrap_or_else(|| vec![0.0; dim]);
    let mut trace = ConvergenceTrace::new();
    let mut summaries = Vec::with_capacity(epochs);
    let mut samples: u64 = 0;
    let mut steps: u64 = 0;
    let b = cfg.minibatch;
    let mut grad = vec![0.0; dim];
    let mut g_one = vec![0.0; dim];
    let mut x_bar = x.clone();

    let record =
        |trace: &mut ConvergenceTrace, point: &[f64], s: usize, p: &EpochParams, samples: u64| {
            if trace.last().is_some_and(|r| r.samples >= samples) {
                return;
            }
            trace.push(TraceRecord {
                samples,
                epoch: s,
                objective: problem.objective(point),
                feasibility: validation.feasibility(point),
                beta: p.beta,
                alpha: p.alpha,
                dist_to_ref: cert.map(|c| dist(point, &c.x_star)),
                wall_time: if cfg.timing {
                    clock.elapsed().as_secs_f64()
                } else {
                    0.0
                },
            });
        };

    for s in 0..epochs {
        let p = schedule_params(cfg.case, s, cfg, problem.norm_bound, problem.mu)?;
        let start = x.clone();
        let mut sum = vec![0.0; dim];
        let mut batch: Vec<Cow<'_, ConstraintSample>> = Vec::with_capacity(b);
        for k in 1..=p.m {
            batch.clear();
            grad.iter_mut().for_each(|g| *g = 0.0);
            for _ in 0..b {
                batch.push(problem.constraints.draw(&mut rng));
                if !problem.smooth.is_zero() {
                    problem.smooth.sample_gradient(&x, &mut rng, &mut g_one);
                    axpy(1.0 / b as f64, &g_one, &mut grad);
                }
            }
            let refs: Vec<&ConstraintSample> = batch.iter().map(|c| c.as_ref()).collect();
            x = sasc_inner_step(problem, &x, &refs, &grad, p.alpha, p.beta)?;
            if !x.iter().all(|v| v.is_finite()) {
                return Err(SascError::Divergence { epoch: s, step: k });
            }
            axpy(1.0, &x, &mut sum);
            samples += b as u64;
            steps += 1;
            if steps.is_multiple_of(cfg.checkpoint_every) || k == p.m {
                let avg: Vec<f64> = sum.iter().map(|v| v / k as f64).collect();
                record(&mut trace, &avg, s, &p, samples);
                if k == p.m {
                    x_bar = avg;
                }
            }
        }
        let summary = EpochSummary {
            epoch: s,
            params: p,
            start,
            last: x.clone(),
            average: x_bar.clone(),
            samples_seen: samples,
        };
        if cfg.case == Case::RestrictedStronglyConvex {
            x = x_bar.clone();
        }
        summaries.push(summary);
    }
    Ok(SascRun {
        x_bar,
        trace,
        epochs: summaries,
    })
}
