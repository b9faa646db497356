//! Moreau-envelope smoothing of nonsmooth terms, feasibility metrics and the
//! smoothed gap.
//!
//! For a set `b` the smoothed indicator is `dist(z, b)^2 / (2 beta)` with
//! gradient `(z - P_b(z)) / beta`. For a proximable `g` the envelope is
//! `g(p) + ||z - p||^2 / (2 beta)` at `p = prox_{beta g}(z)` with gradient
//! `(z - p) / beta`. Both gradients are `1/beta`-Lipschitz.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_positive, Result, SascError};
use crate::problem::{CompositeProblem, ConstraintSample, ConstraintSource, LinearMap};
use crate::prox::{ProxHandle, SetProjector};

/// The nonsmooth function being smoothed.
#[derive(Debug, Clone, Copy)]
pub enum Smoothable<'a> {
    /// Indicator of a closed convex set.
    Set(&'a SetProjector),
    /// A Lipschitz proximable function.
    Prox(&'a ProxHandle),
}

impl<'a> From<&'a SetProjector> for Smoothable<'a> {
    fn from(s: &'a SetProjector) -> Self {
        Smoothable::Set(s)
    }
}

impl<'a> From<&'a ProxHandle> for Smoothable<'a> {
    fn from(p: &'a ProxHandle) -> Self {
        Smoothable::Prox(p)
    }
}

/// Value and gradient of the envelope with parameter `beta` at `z`.
pub fn moreau_grad<'a>(
    z: &[f64],
    inner: impl Into<Smoothable<'a>>,
    beta: f64,
) -> Result<(f64, Vec<f64>)> {
    ensure_positive(beta, "beta")?;
    let (anchor, base) = match inner.into() {
        Smoothable::Set(set) => (set.project(z), 0.0),
        Smoothable::Prox(g) => {
            let p = g.evaluate(z, beta)?;
            let v = g.objective_value(&p);
            (p, v)
        }
    };
    let grad: Vec<f64> = z.iter().zip(&anchor).map(|(a, p)| (a - p) / beta).collect();
    let gap = z
        .iter()
        .zip(&anchor)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>();
    Ok((base + gap / (2.0 * beta), grad))
}

/// Owned form of a smoothed term at a fixed `beta`.
#[derive(Debug, Clone)]
pub struct SmoothedTerm {
    pub beta: f64,
    pub inner: SmoothedInner,
}

#[derive(Debug, Clone)]
pub enum SmoothedInner {
    Set(SetProjector),
    Prox(ProxHandle),
}

impl SmoothedTerm {
    pub fn new(beta: f64, inner: SmoothedInner) -> Result<Self> {
        ensure_positive(beta, "beta")?;
        Ok(SmoothedTerm { beta, inner })
    }

    fn eval(&self, z: &[f64]) -> (f64, Vec<f64>) {
        let r = match &self.inner {
            SmoothedInner::Set(s) => moreau_grad(z, s, self.beta),
            SmoothedInner::Prox(p) => moreau_grad(z, p, self.beta),
        };
        r.expect("beta validated at construction")
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.eval(z).0
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        self.eval(z).1
    }
}

/// Rescales `A x in b` to `(A / ||A||) x in b / ||A||`, which has the same
/// solution set and a unit-norm map.
pub fn normalize_constraint(map: LinearMap, set: SetProjector) -> Result<ConstraintSample> {
    let n = map.op_norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(SascError::DegenerateConstraint(
            "constraint map is zero".into(),
        ));
    }
    if n == 1.0 {
        return ConstraintSample::new(map, set);
    }
    let t = 1.0 / n;
    ConstraintSample::new(map.scaled(t), set.scaled(t))
}

/// `E[dist(A(xi) x, b(xi))^2]`: exact over a finite support when
/// `n_samples` equals its size, seeded Monte Carlo otherwise.
pub fn mean_dist_sq(
    x: &[f64],
    source: &dyn ConstraintSource,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(SascError::InvalidInput(
            "n_samples must be at least 1".into(),
        ));
    }
    if let Some(support) = source.support() {
        if support.is_empty() {
            return Err(SascError::InvalidInput(
                "constraint support is empty".into(),
            ));
        }
        if support.len() == n_samples {
            return Ok(exact_mean_dist_sq(x, support));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = (0..n_samples)
        .map(|_| source.draw(&mut rng).dist_sq(x))
        .sum();
    Ok(total / n_samples as f64)
}

/// Population mean of `dist^2` over a uniformly weighted finite support.
pub fn exact_mean_dist_sq(x: &[f64], support: &[ConstraintSample]) -> f64 {
    support.iter().map(|s| s.dist_sq(x)).sum::<f64>() / support.len() as f64
}

/// Root-mean-square constraint violation `sqrt(E[dist(A(xi) x, b(xi))^2])`.
pub fn feasibility_metric(
    x: &[f64],
    source: &dyn ConstraintSource,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    mean_dist_sq(x, source, n_samples, seed).map(f64::sqrt)
}

/// Held-out constraint draws for the feasibility column.
pub enum ValidationSet<'a> {
    Exact(&'a [ConstraintSample]),
    Drawn(Vec<ConstraintSample>),
}

impl<'a> ValidationSet<'a> {
    /// Same draws as [`feasibility_metric`] with this seed.
    pub fn new(source: &'a dyn ConstraintSource, n: usize, seed: u64) -> Self {
        if let Some(s) = source.support() {
            if s.len() == n {
                return ValidationSet::Exact(s);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ValidationSet::Drawn((0..n).map(|_| source.draw(&mut rng).into_owned()).collect())
    }

    pub fn feasibility(&self, x: &[f64]) -> f64 {
        match self {
            ValidationSet::Exact(s) => exact_mean_dist_sq(x, s).sqrt(),
            ValidationSet::Drawn(s) => exact_mean_dist_sq(x, s).sqrt(),
        }
    }
}

/// Reference quantities at a saddle point `(x*, y*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateInputs {
    pub x_star: Vec<f64>,
    /// `P(x*)`
    pub p_star: f64,
    /// `||y*||` in the dual space of square-integrable multipliers.
    pub y_star_norm: f64,
    /// Gradient-noise bound.
    pub sigma_f: f64,
}

impl CertificateInputs {
    pub fn new(x_star: Vec<f64>, p_star: f64, y_star_norm: f64, sigma_f: f64) -> Result<Self> {
        if !(y_star_norm >= 0.0) {
            return Err(SascError::InvalidParameter {
                name: "y_star_norm",
                reason: "must be nonnegative".into(),
            });
        }
        if !(sigma_f >= 0.0) {
            return Err(SascError::InvalidParameter {
                name: "sigma_f",
                reason: "must be nonnegative".into(),
            });
        }
        Ok(CertificateInputs {
            x_star,
            p_star,
            y_star_norm,
            sigma_f,
        })
    }
}

/// `S_beta(x) = P(x) - P(x*) + E[dist^2] / (2 beta)`.
pub fn smoothed_gap(
    x: &[f64],
    beta: f64,
    problem: &CompositeProblem,
    cert: &CertificateInputs,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    ensure_positive(beta, "beta")?;
    let d2 = mean_dist_sq(x, problem.constraints.as_ref(), n_samples, seed)?;
    Ok(problem.objective(x) - cert.p_star + d2 / (2.0 * beta))
}

/// Slack of each smoothed-gap inequality; nonnegative means it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Slacks {
    /// `S_beta(x) + (beta/2) ||y*||^2`
    pub gap_lower: f64,
    /// `P(x) - P(x*) + E[dist^2] / (4 beta) + beta ||y*||^2`
    pub objective_lower: f64,
    /// `S_beta(x) - (P(x) - P(x*))`
    pub objective_upper: f64,
    /// `4 beta^2 ||y*||^2 + 4 beta S_beta(x) - E[dist^2]`
    pub feasibility: f64,
}

impl Lemma1Slacks {
    pub fn as_array(&self) -> [f64; 4] {
        [
            self.gap_lower,
            self.objective_lower,
            self.objective_upper,
            self.feasibility,
        ]
    }

    pub fn min(&self) -> f64 {
        self.as_array().into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub fn lemma1_residuals(
    x: &[f64],
    beta: f64,
    problem: &CompositeProblem,
    cert: &CertificateInputs,
    n_samples: usize,
    seed: u64,
) -> Result<Lemma1Slacks> {
    ensure_positive(beta, "beta")?;
    let d2 = mean_dist_sq(x, problem.constraints.as_ref(), n_samples, seed)?;
    let gap = problem.objective(x) - cert.p_star;
    let s = gap + d2 / (2.0 * beta);
    let y2 = cert.y_star_norm * cert.y_star_norm;
    Ok(Lemma1Slacks {
        gap_lower: s + 0.5 * beta * y2,
        objective_lower: gap + d2 / (4.0 * beta) + beta * y2,
        objective_upper: s - gap,
        feasibility: 4.0 * beta * beta * y2 + 4.0 * beta * s - d2,
    })
}
