//! The composite problem `min F(x) + h(x)  s.t.  A(xi) x in b(xi)  a.s.`
//!
//! `F = E[f(., xi)]` is a [`SmoothTerm`], `h` a [`ProxHandle`] and the random
//! constraint is drawn from a [`ConstraintSource`].

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SascError};
use crate::linalg::{axpy, dot, norm, norm_sq};
use crate::prox::{ProxHandle, SetProjector};

/// The linear map `A(xi)` of one constraint realization.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    /// A dense `1 x d` row.
    Row(Vec<f64>),
    /// A sparse `1 x dim` row with strictly ascending indices.
    SparseRow {
        indices: Vec<usize>,
        values: Vec<f64>,
        dim: usize,
    },
    /// A dense row-major `rows x cols` matrix.
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
}

impl LinearMap {
    pub fn input_dim(&self) -> usize {
        match self {
            LinearMap::Row(a) => a.len(),
            LinearMap::SparseRow { dim, .. } => *dim,
            LinearMap::Dense { cols, .. } => *cols,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            LinearMap::Row(_) | LinearMap::SparseRow { .. } => 1,
            LinearMap::Dense { rows, .. } => *rows,
        }
    }

    pub fn is_row(&self) -> bool {
        !matches!(self, LinearMap::Dense { .. })
    }

    /// `<a, x>` for row maps.
    #[inline]
    pub fn apply_row(&self, x: &[f64]) -> f64 {
        match self {
            LinearMap::Row(a) => dot(a, x),
            LinearMap::SparseRow {
                indices, values, ..
            } => indices.iter().zip(values).map(|(&i, v)| v * x[i]).sum(),
            LinearMap::Dense { .. } => panic!("apply_row on a dense block"),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::Dense { rows, cols, data } => (0..*rows)
                .map(|r| dot(&data[r * cols..(r + 1) * cols], x))
                .collect(),
            _ => vec![self.apply_row(x)],
        }
    }

    /// `out += alpha * A^T y`
    pub fn adjoint_axpy(&self, alpha: f64, y: &[f64], out: &mut [f64]) {
        match self {
            LinearMap::Row(a) => axpy(alpha * y[0], a, out),
            LinearMap::SparseRow {
                indices, values, ..
            } => {
                let s = alpha * y[0];
                for (&i, v) in indices.iter().zip(values) {
                    out[i] += s * v;
                }
            }
            LinearMap::Dense { rows, cols, data } => {
                for r in 0..*rows {
                    axpy(alpha * y[r], &data[r * cols..(r + 1) * cols], out);
                }
            }
        }
    }

    /// Spectral norm.
    pub fn op_norm(&self) -> f64 {
        match self {
            LinearMap::Row(a) => norm(a),
            LinearMap::SparseRow { values, .. } => norm(values),
            LinearMap::Dense { rows, cols, data } => {
                let m = DMatrix::from_row_slice(*rows, *cols, data);
                m.singular_values().iter().cloned().fold(0.0, f64::max)
            }
        }
    }

    pub fn scaled(&self, t: f64) -> LinearMap {
        match self {
            LinearMap::Row(a) => LinearMap::Row(a.iter().map(|v| v * t).collect()),
            LinearMap::SparseRow {
                indices,
                values,
                dim,
            } => LinearMap::SparseRow {
                indices: indices.clone(),
                values: values.iter().map(|v| v * t).collect(),
                dim: *dim,
            },
            LinearMap::Dense { rows, cols, data } => LinearMap::Dense {
                rows: *rows,
                cols: *cols,
                data: data.iter().map(|v| v * t).collect(),
            },
        }
    }
}

/// One realization `(A(xi), b(xi))` of the random constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSample {
    pub map: LinearMap,
    pub set: SetProjector,
}

impl ConstraintSample {
    pub fn new(map: LinearMap, set: SetProjector) -> Result<Self> {
        if let Some(m) = set.dim() {
            if m != map.output_dim() {
                return Err(SascError::Shape {
                    expected: map.output_dim(),
                    got: m,
                });
            }
        }
        Ok(ConstraintSample { map, set })
    }

    /// `z - P_b(z)` at `z = A x`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        if self.map.is_row() {
            let z = self.map.apply_row(x);
            vec![z - self.set.project_scalar(z)]
        } else {
            let z = self.map.apply(x);
            let p = self.set.project(&z);
            z.iter().zip(&p).map(|(a, b)| a - b).collect()
        }
    }

    /// `dist(A x, b)^2`
    pub fn dist_sq(&self, x: &[f64]) -> f64 {
        if self.map.is_row() {
            let z = self.map.apply_row(x);
            let r = z - self.set.project_scalar(z);
            r * r
        } else {
            norm_sq(&self.residual(x))
        }
    }

    /// Adds `weight * A^T (z - P_b(z)) / beta` to `out`, the gradient of the
    /// smoothed indicator pulled back through the map.
    pub fn add_penalty_gradient(&self, x: &[f64], beta: f64, weight: f64, out: &mut [f64]) {
        let r = self.residual(x);
        self.map.adjoint_axpy(weight / beta, &r, out);
    }

    /// Projection of `x` onto `{u : A u in b}`; closed form for row maps only.
    pub fn project_onto_feasible(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.map.is_row() {
            return Err(SascError::Unsupported(
                "projection onto a multi-row constraint needs a linear solve".into(),
            ));
        }
        let z = self.map.apply_row(x);
        let p = self.set.project_scalar(z);
        let mut out = x.to_vec();
        if p != z {
            let a2 = match &self.map {
                LinearMap::Row(a) => norm_sq(a),
                LinearMap::SparseRow { values, .. } => norm_sq(values),
                LinearMap::Dense { .. } => unreachable!(),
            };
            if a2 == 0.0 {
                return Err(SascError::DegenerateConstraint(
                    "zero row cannot be satisfied".into(),
                ));
            }
            self.map.adjoint_axpy((p - z) / a2, &[1.0], &mut out);
        }
        Ok(out)
    }
}

/// A seeded sampler of constraint realizations.
pub trait ConstraintSource: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn draw(&self, rng: &mut dyn RngCore) -> Cow<'_, ConstraintSample>;
    /// All realizations when the support is finite (uniform weights).
    fn support(&self) -> Option<&[ConstraintSample]> {
        None
    }
}

/// Uniform sampling over a finite list of constraints.
#[derive(Debug, Clone)]
pub struct FiniteConstraints {
    dim: usize,
    samples: Vec<ConstraintSample>,
}

impl FiniteConstraints {
    pub fn new(dim: usize, samples: Vec<ConstraintSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(SascError::InvalidInput(
                "constraint support is empty".into(),
            ));
        }
        for s in &samples {
            if s.map.input_dim() != dim {
                return Err(SascError::Shape {
                    expected: dim,
                    got: s.map.input_dim(),
                });
            }
        }
        Ok(FiniteConstraints { dim, samples })
    }

    pub fn samples(&self) -> &[ConstraintSample] {
        &self.samples
    }

    /// `max ||A(xi)||` over the support.
    pub fn max_op_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.map.op_norm())
            .fold(0.0, f64::max)
    }
}

impl ConstraintSource for FiniteConstraints {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Cow<'_, ConstraintSample> {
        let i = rng.random_range(0..self.samples.len());
        Cow::Borrowed(&self.samples[i])
    }

    fn support(&self) -> Option<&[ConstraintSample]> {
        Some(&self.samples)
    }
}

/// The smooth expectation term `F(x) = E[f(x, xi)]`.
pub trait SmoothTerm: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;
    /// Writes `grad F(x)` into `out`.
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    /// Writes a stochastic gradient `grad f(x, xi)` into `out`.
    fn sample_gradient(&self, x: &[f64], _rng: &mut dyn RngCore, out: &mut [f64]) {
        self.gradient(x, out)
    }
    /// `prox_{step f(., xi)}(x)` for a fresh draw, when available in closed form.
    fn sample_prox(&self, _x: &[f64], _step: f64, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        None
    }
    /// Lipschitz constant of `grad F`.
    fn lipschitz(&self) -> f64;
    /// Bound on `sqrt(E ||grad f(x, xi) - grad F(x)||^2)`.
    fn noise_bound(&self) -> f64 {
        0.0
    }
    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroTerm;

impl SmoothTerm for ZeroTerm {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn sample_prox(&self, x: &[f64], _step: f64, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(x.to_vec())
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// `<c, x>`
#[derive(Debug, Clone)]
pub struct LinearTerm {
    pub c: Vec<f64>,
}

impl SmoothTerm for LinearTerm {
    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }
    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.c);
    }
    fn sample_prox(&self, x: &[f64], step: f64, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        Some(
            x.iter()
                .zip(&self.c)
                .map(|(xi, ci)| xi - step * ci)
                .collect(),
        )
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
}

/// `(curvature / 2) ||x - center||^2`, with optional i.i.d. Gaussian noise of
/// standard deviation `noise` per coordinate added to sampled gradients.
#[derive(Debug, Clone)]
pub struct QuadraticTerm {
    pub center: Vec<f64>,
    pub curvature: f64,
    pub noise: f64,
}

impl QuadraticTerm {
    pub fn half_squared_norm(dim: usize) -> Self {
        QuadraticTerm {
            center: vec![0.0; dim],
            curvature: 1.0,
            noise: 0.0,
        }
    }
}

impl SmoothTerm for QuadraticTerm {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.curvature
            * x.iter()
                .zip(&self.center)
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), ci) in out.iter_mut().zip(x).zip(&self.center) {
            *o = self.curvature * (xi - ci);
        }
    }
    fn sample_gradient(&self, x: &[f64], rng: &mut dyn RngCore, out: &mut [f64]) {
        self.gradient(x, out);
        if self.noise > 0.0 {
            for o in out.iter_mut() {
                let e: f64 = StandardNormal.sample(rng);
                *o += self.noise * e;
            }
        }
    }
    fn sample_prox(&self, x: &[f64], step: f64, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        if self.noise > 0.0 {
            return None;
        }
        let k = step * self.curvature;
        Some(
            x.iter()
                .zip(&self.center)
                .map(|(xi, ci)| (xi + k * ci) / (1.0 + k))
                .collect(),
        )
    }
    fn lipschitz(&self) -> f64 {
        self.curvature
    }
    fn noise_bound(&self) -> f64 {
        self.noise * (self.center.len() as f64).sqrt()
    }
}

/// `F(x) = (1/2n) sum_i (<a_i, x> - b_i)^2`, sampled one row at a time.
#[derive(Debug, Clone)]
pub struct LeastSquaresTerm {
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
    lipschitz: f64,
}

impl LeastSquaresTerm {
    pub fn new(rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || rows.len() != targets.len() {
            return Err(SascError::InvalidInput(
                "least-squares rows and targets must be non-empty and aligned".into(),
            ));
        }
        let lipschitz = rows.iter().map(|r| norm_sq(r)).fold(0.0, f64::max);
        Ok(LeastSquaresTerm {
            rows,
            targets,
            lipschitz,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Gradient of the `i`-th component `(<a_i, x> - b_i)^2 / 2`.
    pub fn component_gradient(&self, x: &[f64], i: usize, out: &mut [f64]) {
        let r = dot(&self.rows[i], x) - self.targets[i];
        out.fill(0.0);
        axpy(r, &self.rows[i], out);
    }
}

impl SmoothTerm for LeastSquaresTerm {
    fn value(&self, x: &[f64]) -> f64 {
        let n = self.rows.len() as f64;
        self.rows
            .iter()
            .zip(&self.targets)
            .map(|(a, b)| (dot(a, x) - b).powi(2))
            .sum::<f64>()
            / (2.0 * n)
    }
    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let n = self.rows.len() as f64;
        for (a, b) in self.rows.iter().zip(&self.targets) {
            axpy((dot(a, x) - b) / n, a, out);
        }
    }
    fn sample_gradient(&self, x: &[f64], rng: &mut dyn RngCore, out: &mut [f64]) {
        let i = rng.random_range(0..self.rows.len());
        self.component_gradient(x, i, out);
    }
    fn sample_prox(&self, x: &[f64], step: f64, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        let i = rng.random_range(0..self.rows.len());
        let a = &self.rows[i];
        let t = step * (dot(a, x) - self.targets[i]) / (1.0 + step * norm_sq(a));
        let mut out = x.to_vec();
        axpy(-t, a, &mut out);
        Some(out)
    }
    /// Upper bound `max_i ||a_i||^2`.
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// A fully specified almost-surely constrained composite problem.
#[derive(Debug, Clone)]
pub struct CompositeProblem {
    pub dim: usize,
    pub smooth: Arc<dyn SmoothTerm>,
    pub nonsmooth: ProxHandle,
    pub constraints: Arc<dyn ConstraintSource>,
    /// `sup_xi ||A(xi)||`
    pub norm_bound: f64,
    /// Restricted strong-convexity modulus, when known.
    pub mu: Option<f64>,
    /// `||A||_{2,2}`, diagnostic only.
    pub mean_square_norm: Option<f64>,
}

impl CompositeProblem {
    pub fn new(
        dim: usize,
        smooth: Arc<dyn SmoothTerm>,
        nonsmooth: ProxHandle,
        constraints: Arc<dyn ConstraintSource>,
        norm_bound: f64,
    ) -> Result<Self> {
        if constraints.dim() != dim {
            return Err(SascError::Shape {
                expected: dim,
                got: constraints.dim(),
            });
        }
        if !(norm_bound > 0.0 && norm_bound.is_finite()) {
            return Err(SascError::InvalidParameter {
                name: "norm_bound",
                reason: format!("must be positive and finite, got {norm_bound}"),
            });
        }
        Ok(CompositeProblem {
            dim,
            smooth,
            nonsmooth,
            constraints,
            norm_bound,
            mu: None,
            mean_square_norm: None,
        })
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    /// `P(x) = F(x) + h(x)`
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.nonsmooth.objective_value(x)
    }

    pub fn lipschitz_grad(&self) -> f64 {
        self.smooth.lipschitz()
    }

    /// Checks `norm_bound >= ||A(xi)||` over a finite support.
    pub fn check_norm_bound(&self) -> Result<()> {
        if let Some(support) = self.constraints.support() {
            for (i, s) in support.iter().enumerate() {
                let n = s.map.op_norm();
                if n > self.norm_bound * (1.0 + 1e-12) {
                    return Err(SascError::Config(format!(
                        "constraint {i} has norm {n} above the declared bound {}",
                        self.norm_bound
                    )));
                }
            }
        }
        Ok(())
    }
}
