//! Builders for the basis-pursuit, portfolio and hard-margin SVM problems.

mod reference;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_positive, Result, SascError};
use crate::linalg::{dot, norm};
use crate::problem::{
    CompositeProblem, ConstraintSample, FiniteConstraints, LeastSquaresTerm, LinearMap, LinearTerm,
    QuadraticTerm, ZeroTerm,
};
use crate::prox::{ProxHandle, SetProjector};
use crate::smoothing::normalize_constraint;

pub use reference::{reference_solution, REFERENCE_MAX_DIM, REFERENCE_MAX_SAMPLES};

/// A sparse vector with strictly ascending 0-based indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseRow {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRow {
    pub fn from_dense(v: &[f64]) -> Self {
        let (indices, values) = v
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(i, x)| (i, *x))
            .unzip();
        SparseRow { indices, values }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, v)| v * x[i])
            .sum()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }
}

/// Labeled rows `(a_i, b_i)` with `b_i` in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSparseDataset {
    pub rows: Vec<SparseRow>,
    pub labels: Vec<f64>,
    pub dim: usize,
}

impl LabeledSparseDataset {
    pub fn new(rows: Vec<SparseRow>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(SascError::InvalidInput(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.indices.len() != row.values.len() {
                return Err(SascError::InvalidInput(format!(
                    "row {r}: index/value length mismatch"
                )));
            }
            if row.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SascError::InvalidInput(format!(
                    "row {r}: indices not strictly ascending"
                )));
            }
            if row.indices.last().is_some_and(|&i| i >= dim) {
                return Err(SascError::InvalidInput(format!(
                    "row {r}: index beyond dimension {dim}"
                )));
            }
        }
        Ok(LabeledSparseDataset { rows, labels, dim })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn check_labels(&self) -> Result<()> {
        match self.labels.iter().position(|&b| b != 1.0 && b != -1.0) {
            Some(row) => Err(SascError::InvalidLabel {
                row,
                label: self.labels[row],
            }),
            None => Ok(()),
        }
    }

    /// Fraction of rows with `b_i <a_i, x> <= 0`.
    pub fn error_rate(&self, x: &[f64]) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let wrong = self
            .rows
            .iter()
            .zip(&self.labels)
            .filter(|(r, &b)| b * r.dot(x) <= 0.0)
            .count();
        wrong as f64 / self.rows.len() as f64
    }
}

/// A basis-pursuit instance with a planted sparse solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPursuitInstance {
    /// Unit-norm rows after centering.
    pub rows: Vec<Vec<f64>>,
    /// `targets[i] = <rows[i], x_star>`.
    pub targets: Vec<f64>,
    pub x_star: Vec<f64>,
    pub rho: f64,
    pub sparsity: usize,
}

impl BasisPursuitInstance {
    pub fn dim(&self) -> usize {
        self.x_star.len()
    }

    /// Step-size heuristic `1e-2 ||a_1 b_1||_inf`.
    pub fn auto_alpha0(&self) -> f64 {
        let b = self.targets[0].abs();
        1e-2 * self.rows[0]
            .iter()
            .fold(0.0f64, |m, v| m.max((v * b).abs()))
    }
}

/// `Sigma_ij = rho^|i-j|`
pub fn toeplitz_covariance(d: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Subtracts each column's mean, then scales each row to unit norm.
pub fn center_and_normalize(rows: &mut [Vec<f64>]) -> Result<()> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        rows.iter_mut().for_each(|r| r[j] -= mean);
    }
    for (i, r) in rows.iter_mut().enumerate() {
        let nr = norm(r);
        if !(nr > 0.0) {
            return Err(SascError::Numeric(format!(
                "row {i} vanishes after centering"
            )));
        }
        r.iter_mut().for_each(|v| *v /= nr);
    }
    Ok(())
}

/// Gaussian rows with covariance `rho^|i-j|`, centered and normalized, and a
/// planted `sparsity`-sparse solution with standard normal entries.
pub fn gen_basis_pursuit(
    d: usize,
    n: usize,
    sparsity: usize,
    rho: f64,
    seed: u64,
) -> Result<BasisPursuitInstance> {
    if d == 0 || sparsity == 0 || sparsity > d {
        return Err(SascError::InvalidInput(format!(
            "need 0 < sparsity <= d, got sparsity {sparsity}, d {d}"
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(SascError::InvalidInput(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    if n == 0 {
        return Err(SascError::InvalidInput("n must be at least 1".into()));
    }
    let chol = toeplitz_covariance(d, rho)
        .cholesky()
        .ok_or_else(|| SascError::Numeric("covariance is not positive definite".into()))?;
    let l = chol.l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            (0..d)
                .map(|i| (0..=i).map(|j| l[(i, j)] * z[j]).sum())
                .collect()
        })
        .collect();
    let mut x_star = vec![0.0; d];
    for i in sample(&mut rng, d, sparsity) {
        let mut v: f64 = StandardNormal.sample(&mut rng);
        while v == 0.0 {
            v = StandardNormal.sample(&mut rng);
        }
        x_star[i] = v;
    }
    center_and_normalize(&mut rows)?;
    let targets = rows.iter().map(|r| dot(r, &x_star)).collect();
    Ok(BasisPursuitInstance {
        rows,
        targets,
        x_star,
        rho,
        sparsity,
    })
}

/// `min ||x||_1  s.t.  <a_i, x> = b_i` for a uniformly drawn `i`.
pub fn make_bp_problem(inst: &BasisPursuitInstance) -> Result<CompositeProblem> {
    let samples = inst
        .rows
        .iter()
        .zip(&inst.targets)
        .map(|(a, &b)| ConstraintSample::new(LinearMap::Row(a.clone()), SetProjector::singleton(b)))
        .collect::<Result<Vec<_>>>()?;
    let src = FiniteConstraints::new(inst.dim(), samples)?;
    CompositeProblem::new(
        inst.dim(),
        Arc::new(ZeroTerm),
        ProxHandle::l1(),
        Arc::new(src),
        1.0,
    )
}

/// `min (1/2n) sum_i (<a_i, x> - b_i)^2` on the same rows, unconstrained.
pub fn make_bp_least_squares_problem(inst: &BasisPursuitInstance) -> Result<CompositeProblem> {
    let base = make_bp_problem(inst)?;
    let ls = LeastSquaresTerm::new(inst.rows.clone(), inst.targets.clone())?;
    CompositeProblem::new(
        inst.dim(),
        Arc::new(ls),
        ProxHandle::Zero,
        base.constraints,
        1.0,
    )
}

/// `max <mean return, x>  s.t.  sum x = 1,  |<a_i - mean, x>| <= epsilon`.
/// Rows equal to the mean carry no constraint and are dropped.
pub fn make_portfolio_problem(returns: &[Vec<f64>], epsilon: f64) -> Result<CompositeProblem> {
    if returns.len() < 2 {
        return Err(SascError::InsufficientData(format!(
            "need at least 2 return rows, got {}",
            returns.len()
        )));
    }
    ensure_positive(epsilon, "epsilon")?;
    let d = returns[0].len();
    if d == 0 || returns.iter().any(|r| r.len() != d) {
        return Err(SascError::InvalidInput(
            "return rows must share a positive length".into(),
        ));
    }
    let n = returns.len() as f64;
    let avg: Vec<f64> = (0..d)
        .map(|j| returns.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let mut samples = Vec::with_capacity(returns.len());
    for r in returns {
        let dev: Vec<f64> = r.iter().zip(&avg).map(|(a, m)| a - m).collect();
        if norm(&dev) == 0.0 {
            continue;
        }
        samples.push(normalize_constraint(
            LinearMap::Row(dev),
            SetProjector::interval(-epsilon, epsilon)?,
        )?);
    }
    if samples.is_empty() {
        return Err(SascError::InsufficientData(
            "every return row equals the mean".into(),
        ));
    }
    let src = FiniteConstraints::new(d, samples)?;
    let budget = ProxHandle::Indicator(SetProjector::hyperplane(vec![1.0; d], 1.0)?);
    let neg: Vec<f64> = avg.iter().map(|v| -v).collect();
    CompositeProblem::new(
        d,
        Arc::new(LinearTerm { c: neg }),
        budget,
        Arc::new(src),
        1.0,
    )
}

/// `min ||x||^2 / 2  s.t.  b_i <a_i, x> >= 1`, with unit-normalized rows.
pub fn make_svm_problem(ds: &LabeledSparseDataset) -> Result<CompositeProblem> {
    ds.check_labels()?;
    if ds.is_empty() {
        return Err(SascError::InsufficientData("empty dataset".into()));
    }
    let samples = ds
        .rows
        .iter()
        .zip(&ds.labels)
        .map(|(r, &b)| {
            let map = LinearMap::SparseRow {
                indices: r.indices.clone(),
                values: r.values.iter().map(|v| b * v).collect(),
                dim: ds.dim,
            };
            normalize_constraint(map, SetProjector::halfline(1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let src = FiniteConstraints::new(ds.dim, samples)?;
    Ok(CompositeProblem::new(
        ds.dim,
        Arc::new(QuadraticTerm::half_squared_norm(ds.dim)),
        ProxHandle::Zero,
        Arc::new(src),
        1.0,
    )?
    .with_mu(1.0))
}

/// Gaussian points labeled by a planted unit separator, keeping only those
/// with `|<w, a>| >= margin`. Returns the dataset and the separator.
pub fn gen_separable_svm(
    d: usize,
    n: usize,
    margin: f64,
    seed: u64,
) -> Result<(LabeledSparseDataset, Vec<f64>)> {
    if d == 0 || n == 0 {
        return Err(SascError::InvalidInput("need d >= 1 and n >= 1".into()));
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(SascError::InvalidInput(format!(
            "margin must lie in [0, 1), got {margin}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nw = norm(&w);
    w.iter_mut().for_each(|v| *v /= nw);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while rows.len() < n {
        let a: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = dot(&w, &a);
        if s.abs() < margin {
            continue;
        }
        labels.push(s.signum());
        rows.push(SparseRow::from_dense(&a));
    }
    Ok((LabeledSparseDataset::new(rows, labels, d)?, w))
}

/// Price relatives `1 + drift_j + vol * N(0, 1)` for `n` days and `d` assets.
pub fn gen_portfolio_returns(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drift: Vec<f64> = (0..d)
        .map(|j| 1e-3 * (j as f64 - d as f64 / 2.0) / d as f64)
        .collect();
    (0..n)
        .map(|_| {
            drift
                .iter()
                .map(|m| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    1.0 + m + 0.01 * e
                })
                .collect()
        })
        .collect()
}
