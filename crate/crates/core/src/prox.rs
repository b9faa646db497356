//! Closed-form proximal operators and Euclidean projections.
//!
//! Everything here is a pure function of its inputs. [`SetProjector`] covers
//! the closed convex sets that show up as constraint targets (points,
//! boxes/intervals/half-lines, hyperplanes) and [`ProxHandle`] wraps the
//! nonsmooth terms whose prox is cheap.

use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_finite, ensure_positive, Result, SascError};
use crate::linalg::{dot, norm_sq};

/// Absolute slack used when an indicator is asked for its value at a point
/// that should lie on the set up to rounding.
pub const INDICATOR_TOL: f64 = 1e-9;

/// Componentwise shrinkage, the prox of `tau * ||.||_1`.
pub fn soft_threshold(z: &[f64], tau: f64) -> Result<Vec<f64>> {
    ensure_positive(tau, "tau")?;
    ensure_finite(z, "soft_threshold input")?;
    Ok(z.iter().map(|&v| shrink(v, tau)).collect())
}

#[inline]
fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Projection onto `{x : <a, x> = b}`.
pub fn project_hyperplane(z: &[f64], a: &[f64], b: f64) -> Result<Vec<f64>> {
    if z.len() != a.len() {
        return Err(SascError::Shape {
            expected: a.len(),
            got: z.len(),
        });
    }
    let a2 = norm_sq(a);
    if a2 == 0.0 || !a2.is_finite() {
        return Err(SascError::DegenerateConstraint(
            "hyperplane normal has zero norm".into(),
        ));
    }
    let t = (dot(a, z) - b) / a2;
    Ok(z.iter().zip(a).map(|(zi, ai)| zi - t * ai).collect())
}

/// Projection of a scalar onto `[lo, inf)`.
#[inline]
pub fn project_halfspace(z: f64, lo: f64) -> f64 {
    z.max(lo)
}

/// Projection of a scalar onto `[lo, hi]`.
pub fn project_interval(z: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo > hi || lo.is_nan() || hi.is_nan() {
        return Err(SascError::InvalidSet(format!(
            "interval [{lo}, {hi}] is empty"
        )));
    }
    Ok(z.max(lo).min(hi))
}

/// A closed convex set with a cheap Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum SetProjector {
    /// The singleton `{c}`.
    Point(Vec<f64>),
    /// Componentwise box `[lo_i, hi_i]`; infinite bounds allowed.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `{z : <normal, z> = offset}`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// The whole space.
    Whole,
}

impl SetProjector {
    pub fn singleton(b: f64) -> Self {
        SetProjector::Point(vec![b])
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(SascError::InvalidSet(format!(
                "interval [{lo}, {hi}] is empty"
            )));
        }
        Ok(SetProjector::Box {
            lo: vec![lo],
            hi: vec![hi],
        })
    }

    /// The half-line `[lo, inf)`.
    pub fn halfline(lo: f64) -> Self {
        SetProjector::Box {
            lo: vec![lo],
            hi: vec![f64::INFINITY],
        }
    }

    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if norm_sq(&normal) == 0.0 {
            return Err(SascError::DegenerateConstraint(
                "hyperplane normal has zero norm".into(),
            ));
        }
        Ok(SetProjector::Hyperplane { normal, offset })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(SascError::Shape {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(l, h)| l > h || l.is_nan() || h.is_nan())
        {
            return Err(SascError::InvalidSet(
                "box has an empty coordinate range".into(),
            ));
        }
        Ok(SetProjector::Box { lo, hi })
    }

    /// Dimension of the ambient space, if the set fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SetProjector::Point(c) => Some(c.len()),
            SetProjector::Box { lo, .. } => Some(lo.len()),
            SetProjector::Hyperplane { normal, .. } => Some(normal.len()),
            SetProjector::Whole => None,
        }
    }

    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let mut out = z.to_vec();
        self.project_in_place(&mut out);
        out
    }

    pub fn project_in_place(&self, z: &mut [f64]) {
        match self {
            SetProjector::Point(c) => {
                debug_assert_eq!(c.len(), z.len());
                z.copy_from_slice(c);
            }
            SetProjector::Box { lo, hi } => {
                debug_assert_eq!(lo.len(), z.len());
                for ((zi, l), h) in z.iter_mut().zip(lo).zip(hi) {
                    *zi = zi.max(*l).min(*h);
                }
            }
            SetProjector::Hyperplane { normal, offset } => {
                let t = (dot(normal, z) - offset) / norm_sq(normal);
                for (zi, ni) in z.iter_mut().zip(normal) {
                    *zi -= t * ni;
                }
            }
            SetProjector::Whole => {}
        }
    }

    /// Projection of a scalar; only meaningful for one-dimensional sets.
    #[inline]
    pub fn project_scalar(&self, z: f64) -> f64 {
        match self {
            SetProjector::Point(c) => c[0],
            SetProjector::Box { lo, hi } => z.max(lo[0]).min(hi[0]),
            SetProjector::Hyperplane { normal, offset } => offset / normal[0],
            SetProjector::Whole => z,
        }
    }

    pub fn dist_sq(&self, z: &[f64]) -> f64 {
        let p = self.project(z);
        z.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn dist(&self, z: &[f64]) -> f64 {
        self.dist_sq(z).sqrt()
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.dist(z) <= tol
    }

    /// The image of the set under `z -> t z` for `t > 0`.
    pub fn scaled(&self, t: f64) -> SetProjector {
        match self {
            SetProjector::Point(c) => SetProjector::Point(c.iter().map(|v| v * t).collect()),
            SetProjector::Box { lo, hi } => SetProjector::Box {
                lo: lo.iter().map(|v| v * t).collect(),
                hi: hi.iter().map(|v| v * t).collect(),
            },
            SetProjector::Hyperplane { normal, offset } => SetProjector::Hyperplane {
                normal: normal.clone(),
                offset: offset * t,
            },
            SetProjector::Whole => SetProjector::Whole,
        }
    }
}

type ProxFn = dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync;
type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied proximable function.
#[derive(Clone)]
pub struct CustomProx {
    pub name: String,
    prox: Arc<ProxFn>,
    value: Arc<ValueFn>,
}

impl CustomProx {
    pub fn new(
        name: impl Into<String>,
        prox: impl Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CustomProx {
            name: name.into(),
            prox: Arc::new(prox),
            value: Arc::new(value),
        }
    }
}

impl fmt::Debug for CustomProx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProx")
            .field("name", &self.name)
            .finish()
    }
}

/// A proximable convex function `phi` with `evaluate(z, step) = prox_{step*phi}(z)`.
#[derive(Debug, Clone)]
pub enum ProxHandle {
    Zero,
    /// `weight * ||x||_1`
    L1 {
        weight: f64,
    },
    /// `<c, x>`
    Linear {
        c: Vec<f64>,
    },
    /// Indicator of a projectable set.
    Indicator(SetProjector),
    Custom(CustomProx),
}

impl ProxHandle {
    pub fn l1() -> Self {
        ProxHandle::L1 { weight: 1.0 }
    }

    pub fn evaluate(&self, z: &[f64], step: f64) -> Result<Vec<f64>> {
        ensure_positive(step, "step")?;
        ensure_finite(z, "prox input")?;
        Ok(match self {
            ProxHandle::Zero => z.to_vec(),
            ProxHandle::L1 { weight } => z.iter().map(|&v| shrink(v, step * weight)).collect(),
            ProxHandle::Linear { c } => {
                if c.len() != z.len() {
                    return Err(SascError::Shape {
                        expected: c.len(),
                        got: z.len(),
                    });
                }
                z.iter().zip(c).map(|(zi, ci)| zi - step * ci).collect()
            }
            ProxHandle::Indicator(set) => {
                if let Some(d) = set.dim() {
                    if d != z.len() {
                        return Err(SascError::Shape {
                            expected: d,
                            got: z.len(),
                        });
                    }
                }
                set.project(z)
            }
            ProxHandle::Custom(c) => (c.prox)(z, step),
        })
    }

    /// Value of the function; `+inf` off the domain of an indicator.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        match self {
            ProxHandle::Zero => 0.0,
            ProxHandle::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            ProxHandle::Linear { c } => dot(c, x),
            ProxHandle::Indicator(set) => {
                let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if set.dist(x) <= INDICATOR_TOL * scale {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxHandle::Custom(c) => (c.value)(x),
        }
    }

    /// The underlying set when this is the indicator of a projectable set
    /// (the zero function is the indicator of the whole space).
    pub fn as_projector(&self) -> Option<SetProjector> {
        match self {
            ProxHandle::Zero => Some(SetProjector::Whole),
            ProxHandle::Indicator(s) => Some(s.clone()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ProxHandle::Zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, dot};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Minimizes `tau|x| + (x - z)^2 / 2` on a uniform grid.
    fn grid_prox_l1(z: f64, tau: f64, step: f64) -> f64 {
        let lo = z.min(0.0) - 1.0;
        let hi = z.max(0.0) + 1.0;
        let n = ((hi - lo) / step).ceil() as usize;
        (0..=n)
            .map(|i| lo + i as f64 * step)
            .min_by(|a, b| {
                let fa = tau * a.abs() + 0.5 * (a - z) * (a - z);
                let fb = tau * b.abs() + 0.5 * (b - z) * (b - z);
                fa.partial_cmp(&fb).unwrap()
            })
            .unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(
            soft_threshold(&[3.0, -0.5, 1.0], 1.0).unwrap(),
            vec![2.0, 0.0, 0.0]
        );
        assert_eq!(soft_threshold(&[0.0, 0.0], 5.0).unwrap(), vec![0.0, 0.0]);
        let out = soft_threshold(&[1.5, -2.5], 0.5).unwrap();
        let grid = [grid_prox_l1(1.5, 0.5, 1e-4), grid_prox_l1(-2.5, 0.5, 1e-4)];
        assert_eq!(out, vec![1.0, -2.0]);
        for (o, g) in out.iter().zip(grid) {
            assert!((o - g).abs() < 1e-3);
        }
    }

    #[test]
    fn soft_threshold_rejects_bad_input() {
        assert!(soft_threshold(&[f64::NAN], 1.0).is_err());
        assert!(soft_threshold(&[1.0], 0.0).is_err());
        assert!(soft_threshold(&[1.0], -1.0).is_err());
    }

    #[test]
    fn soft_threshold_matches_grid_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z: f64 = rng.random_range(-3.0..3.0);
            let tau: f64 = rng.random_range(0.01..2.0);
            let got = soft_threshold(&[z], tau).unwrap()[0];
            assert!(
                (got - grid_prox_l1(z, tau, 1e-4)).abs() <= 1e-3,
                "z={z} tau={tau}"
            );
        }
    }

    #[test]
    fn hyperplane_examples() {
        assert_eq!(
            project_hyperplane(&[1.0, 1.0], &[1.0, 0.0], 0.0).unwrap(),
            vec![0.0, 1.0]
        );
        let a = [1.0, 1.0, 1.0];
        let p = project_hyperplane(&[0.2, 0.2, 0.2], &a, 1.0).unwrap();
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((dot(&a, &p) - 1.0).abs() <= 1e-12);
        let on = [0.5, 0.5, 0.0];
        let q = project_hyperplane(&on, &a, 1.0).unwrap();
        assert!(dist(&q, &on) < 1e-15);
        assert!(matches!(
            project_hyperplane(&[1.0], &[0.0], 1.0),
            Err(SascError::DegenerateConstraint(_))
        ));
    }

    #[test]
    fn hyperplane_projection_is_closest_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b: f64 = rng.random_range(-2.0..2.0);
            let z: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let p = project_hyperplane(&z, &a, b).unwrap();
            let d = dist(&p, &z);
            for _ in 0..100 {
                let w: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
                let y = project_hyperplane(&w, &a, b).unwrap();
                assert!(d <= dist(&y, &z) + 1e-12);
            }
        }
    }

    #[test]
    fn scalar_projection_examples() {
        assert_eq!(project_halfspace(0.4, 1.0), 1.0);
        assert_eq!(project_halfspace(2.0, 1.0), 2.0);
        assert_eq!(project_halfspace(-3.0, 1.0), 1.0);
        assert_eq!(project_interval(2.0, -0.2, 0.2).unwrap(), 0.2);
        assert_eq!(project_interval(0.1, -0.2, 0.2).unwrap(), 0.1);
        assert_eq!(project_interval(-5.0, -0.2, 0.2).unwrap(), -0.2);
        assert!(matches!(
            project_interval(0.0, 1.0, -1.0),
            Err(SascError::InvalidSet(_))
        ));
    }

    #[test]
    fn prox_library_handles() {
        let z = [1.0, -2.0];
        assert_eq!(ProxHandle::Zero.evaluate(&z, 0.3).unwrap(), z.to_vec());
        let lin = ProxHandle::Linear { c: vec![1.0, 2.0] };
        assert_eq!(lin.evaluate(&z, 0.5).unwrap(), vec![0.5, -3.0]);
        let ind = ProxHandle::Indicator(SetProjector::hyperplane(vec![1.0, 1.0], 1.0).unwrap());
        let p = ind.evaluate(&z, 1.0).unwrap();
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
        assert_eq!(ind.objective_value(&p), 0.0);
        assert_eq!(ind.objective_value(&z), f64::INFINITY);
    }

    fn random_sets(rng: &mut ChaCha8Rng) -> Vec<SetProjector> {
        let lo: f64 = rng.random_range(-1.0..0.5);
        vec![
            SetProjector::singleton(rng.random_range(-1.0..1.0)),
            SetProjector::interval(lo, lo + rng.random_range(0.0..1.0)).unwrap(),
            SetProjector::halfline(lo),
            SetProjector::Whole,
        ]
    }

    #[test]
    fn projectors_idempotent_and_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let sets = random_sets(&mut rng);
        let plane = SetProjector::hyperplane(vec![0.3, -1.2, 0.5], 0.7).unwrap();
        let boxed =
            SetProjector::boxed(vec![-1.0, 0.0, -0.5], vec![1.0, 0.5, f64::INFINITY]).unwrap();
        for _ in 0..10_000 {
            let z1 = rng.random_range(-5.0..5.0);
            let z2 = rng.random_range(-5.0..5.0);
            for s in &sets {
                let p1 = s.project(&[z1]);
                let p2 = s.project(&[z2]);
                assert!((s.project(&p1)[0] - p1[0]).abs() <= 1e-12);
                assert!((p1[0] - p2[0]).abs() <= (z1 - z2).abs() + 1e-12);
                assert!(s.dist(&[z1]) >= 0.0);
                assert_eq!(s.project_scalar(z1), p1[0]);
            }
            let v1: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let v2: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            for s in [&plane, &boxed] {
                let p1 = s.project(&v1);
                let p2 = s.project(&v2);
                assert!(dist(&s.project(&p1), &p1) <= 1e-12);
                assert!(dist(&p1, &p2) <= dist(&v1, &v2) + 1e-12);
                assert!(s.dist(&p1) <= 1e-12);
            }
        }
    }

    #[test]
    fn dist_zero_iff_member() {
        let s = SetProjector::interval(-0.2, 0.2).unwrap();
        assert_eq!(s.dist(&[0.1]), 0.0);
        assert!(s.dist(&[0.3]) > 0.0);
        let h = SetProjector::halfline(1.0);
        assert_eq!(h.dist(&[4.0]), 0.0);
        assert!((h.dist(&[0.0]) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn l1_prox_is_firmly_nonexpansive(
            z1 in proptest::collection::vec(-10.0f64..10.0, 3),
            z2 in proptest::collection::vec(-10.0f64..10.0, 3),
            step in 0.01f64..3.0,
        ) {
            let h = ProxHandle::l1();
            let p1 = h.evaluate(&z1, step).unwrap();
            let p2 = h.evaluate(&z2, step).unwrap();
            let dp: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| a - b).collect();
            let dz: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| a - b).collect();
            // ||p1 - p2||^2 <= <p1 - p2, z1 - z2>
            prop_assert!(dot(&dp, &dp) <= dot(&dp, &dz) + 1e-12);
        }
    }
}
