//! Deterministic full-batch oracle for small problems: accelerated proximal
//! gradient on `F + h + mean dist^2 / (2 beta)`, halving `beta` between stages.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Result, SascError};
use crate::linalg::{axpy, dot, norm, norm_sq};
use crate::problem::{CompositeProblem, ConstraintSample, LinearMap};
use crate::smoothing::exact_mean_dist_sq;

pub const REFERENCE_MAX_SAMPLES: usize = 200;
pub const REFERENCE_MAX_DIM: usize = 50;
const MAX_ITERATIONS: u64 = 10_000_000;
const MAX_STAGE_ITERATIONS: u64 = 400_000;

fn map_rows(map: &LinearMap) -> Vec<Vec<f64>> {
    match map {
        LinearMap::Row(a) => vec![a.clone()],
        LinearMap::SparseRow {
            indices,
            values,
            dim,
        } => {
            let mut a = vec![0.0; *dim];
            for (&i, v) in indices.iter().zip(values) {
                a[i] = *v;
            }
            vec![a]
        }
        LinearMap::Dense { rows, cols, data } => (0..*rows)
            .map(|r| data[r * cols..(r + 1) * cols].to_vec())
            .collect(),
    }
}

/// Largest eigenvalue of `mean_i A_i^T A_i`.
fn penalty_curvature(dim: usize, support: &[ConstraintSample]) -> f64 {
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for s in support {
        for r in map_rows(&s.map) {
            let v = nalgebra::DVector::from_vec(r);
            g += &v * v.transpose();
        }
    }
    g /= support.len() as f64;
    SymmetricEigen::new(g)
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Returns `(x_ref, P(x_ref))` once the root-mean-square violation and the
/// objective change between consecutive stages are both at most `tolerance`.
pub fn reference_solution(problem: &CompositeProblem, tolerance: f64) -> Result<(Vec<f64>, f64)> {
    let support = problem.constraints.support().ok_or_else(|| {
        SascError::Unsupported("reference solution needs a finite constraint support".into())
    })?;
    let (n, d) = (support.len(), problem.dim);
    if n > REFERENCE_MAX_SAMPLES || d > REFERENCE_MAX_DIM {
        return Err(SascError::Unsupported(format!(
            "reference solution is limited to n <= {REFERENCE_MAX_SAMPLES}, d <= {REFERENCE_MAX_DIM}; got n = {n}, d = {d}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(SascError::InvalidParameter {
            name: "tolerance",
            reason: format!("must be positive, got {tolerance}"),
        });
    }
    let lip_f = problem.lipschitz_grad();
    let curv = penalty_curvature(d, support);
    let w = 1.0 / n as f64;

    let gradient = |x: &[f64], beta: f64, out: &mut Vec<f64>| {
        problem.smooth.gradient(x, out);
        for s in support {
            s.add_penalty_gradient(x, beta, w, out);
        }
    };

    let mut x = problem.nonsmooth.evaluate(&vec![0.0; d], 1.0)?;
    let mut prev_obj = f64::INFINITY;
    let mut beta = 1.0;
    let mut total: u64 = 0;
    let mut g = vec![0.0; d];
    loop {
        let step = 1.0 / (lip_f + curv / beta);
        let mut y = x.clone();
        let mut t = 1.0f64;
        for _ in 0..MAX_STAGE_ITERATIONS {
            total += 1;
            if total > MAX_ITERATIONS {
                return Err(SascError::NoConvergence {
                    iterations: MAX_ITERATIONS,
                });
            }
            gradient(&y, beta, &mut g);
            let mut z = y.clone();
            axpy(-step, &g, &mut z);
            let x_new = problem.nonsmooth.evaluate(&z, step)?;
            let mapping: Vec<f64> = y.iter().zip(&x_new).map(|(a, b)| (a - b) / step).collect();
            let delta: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            if dot(&mapping, &delta) < 0.0 {
                t = 1.0;
                y = x_new.clone();
            } else {
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
                y = x_new.clone();
                axpy((t - 1.0) / t_next, &delta, &mut y);
                t = t_next;
            }
            x = x_new;
            if norm(&mapping) <= 1e-2 * tolerance && norm_sq(&delta) > 0.0 || norm_sq(&delta) == 0.0
            {
                break;
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SascError::Numeric("reference iteration diverged".into()));
        }
        let feas = exact_mean_dist_sq(&x, support).sqrt();
        let obj = problem.objective(&x);
        if feas <= tolerance && (obj - prev_obj).abs() <= tolerance {
            return Ok((x, obj));
        }
        prev_obj = obj;
        beta *= 0.5;
        if beta < f64::MIN_POSITIVE {
            return Err(SascError::NoConvergence { iterations: total });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist;
    use crate::problem::{FiniteConstraints, QuadraticTerm};
    use crate::problems::{gen_basis_pursuit, make_bp_problem, make_portfolio_problem};
    use crate::prox::{ProxHandle, SetProjector};
    use std::sync::Arc;

    #[test]
    fn analytic_hyperplane() {
        let row =
            ConstraintSample::new(LinearMap::Row(vec![1.0, 0.0]), SetProjector::singleton(1.0))
                .unwrap();
        let src = FiniteConstraints::new(2, vec![row]).unwrap();
        let p = CompositeProblem::new(
            2,
            Arc::new(QuadraticTerm::half_squared_norm(2)),
            ProxHandle::Zero,
            Arc::new(src),
            1.0,
        )
        .unwrap();
        let (x, v) = reference_solution(&p, 1e-8).unwrap();
        assert!(dist(&x, &[1.0, 0.0]) < 1e-7, "{x:?}");
        assert!((v - 0.5).abs() < 1e-7);
    }

    #[test]
    fn recovers_planted_sparse_vector() {
        let inst = gen_basis_pursuit(6, 40, 2, 0.5, 12).unwrap();
        let p = make_bp_problem(&inst).unwrap();
        let (x, _) = reference_solution(&p, 1e-7).unwrap();
        assert!(dist(&x, &inst.x_star) < 1e-4, "{x:?} vs {:?}", inst.x_star);
    }

    /// Best vertex of `{x : sum x = 1, lo_i <= <r_i, x> <= hi_i}` in three
    /// dimensions, found by intersecting every pair of boundary planes.
    fn best_vertex(c: &[f64; 3], rows: &[([f64; 3], f64, f64)]) -> [f64; 3] {
        let planes: Vec<([f64; 3], f64)> = rows
            .iter()
            .flat_map(|(r, lo, hi)| [(*r, *lo), (*r, *hi)])
            .collect();
        let feasible = |x: &[f64; 3]| {
            rows.iter().all(|(r, lo, hi)| {
                let v = r[0] * x[0] + r[1] * x[1] + r[2] * x[2];
                v >= lo - 1e-9 && v <= hi + 1e-9
            })
        };
        let mut best: Option<([f64; 3], f64)> = None;
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                let m = nalgebra::Matrix3::new(
                    1.0,
                    1.0,
                    1.0,
                    planes[i].0[0],
                    planes[i].0[1],
                    planes[i].0[2],
                    planes[j].0[0],
                    planes[j].0[1],
                    planes[j].0[2],
                );
                let Some(inv) = m.try_inverse() else { continue };
                let v = inv * nalgebra::Vector3::new(1.0, planes[i].1, planes[j].1);
                let x = [v[0], v[1], v[2]];
                if feasible(&x) {
                    let val = c[0] * x[0] + c[1] * x[1] + c[2] * x[2];
                    if best.is_none_or(|(_, b)| val > b) {
                        best = Some((x, val));
                    }
                }
            }
        }
        best.unwrap().0
    }

    #[test]
    fn three_asset_portfolio_matches_vertex_enumeration() {
        let returns = vec![
            vec![1.05, 1.00, 1.01],
            vec![1.07, 0.99, 1.00],
            vec![1.04, 1.02, 0.99],
            vec![1.06, 1.01, 1.02],
        ];
        let eps = 0.05;
        let p = make_portfolio_problem(&returns, eps).unwrap();
        let (x, _) = reference_solution(&p, 1e-7).unwrap();
        let avg: Vec<f64> = (0..3)
            .map(|j| returns.iter().map(|r| r[j]).sum::<f64>() / 4.0)
            .collect();
        let rows: Vec<([f64; 3], f64, f64)> = returns
            .iter()
            .map(|r| ([r[0] - avg[0], r[1] - avg[1], r[2] - avg[2]], -eps, eps))
            .collect();
        let v = best_vertex(&[avg[0], avg[1], avg[2]], &rows);
        let gain = |x: &[f64]| dot(&avg, x);
        assert!((gain(&x) - gain(&v)).abs() < 1e-5, "{x:?} vs {v:?}");
        let top = (0..3).max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap();
        assert_eq!(top, 0);
        assert!(x[0] >= 1.0 - 1e-6, "{x:?}");
    }

    #[test]
    fn rejects_large_problems() {
        let inst = gen_basis_pursuit(6, 300, 2, 0.5, 1).unwrap();
        let p = make_bp_problem(&inst).unwrap();
        assert!(matches!(
            reference_solution(&p, 1e-6),
            Err(SascError::Unsupported(_))
        ));
    }
}
