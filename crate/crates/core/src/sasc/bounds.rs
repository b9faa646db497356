//! Rate constants and the predicted bound curves.

use crate::error::{Result, SascError};
use crate::linalg::dist;
use crate::sasc::{Case, SascConfig};
use crate::smoothing::CertificateInputs;

/// Constants of the general convex rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub y_star_norm: f64,
}

/// Constants of the restricted strongly convex rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Constants {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub y_star_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateConstants {
    Case1(Case1Constants),
    Case2(Case2Constants),
}

impl RateConstants {
    pub fn case(&self) -> Case {
        match self {
            RateConstants::Case1(_) => Case::GeneralConvex,
            RateConstants::Case2(_) => Case::RestrictedStronglyConvex,
        }
    }
}

fn check_m0(cfg: &SascConfig) -> Result<()> {
    if cfg.m0 < 2 {
        return Err(SascError::UndefinedConstant(
            "rate constants divide by m0 - 1; need m0 >= 2".into(),
        ));
    }
    if !(cfg.omega > 1.0) || !(cfg.alpha0 > 0.0) {
        return Err(SascError::Config("need omega > 1 and alpha0 > 0".into()));
    }
    Ok(())
}

fn initial_gap_sq(cert: &CertificateInputs, x0: &[f64]) -> Result<f64> {
    if x0.len() != cert.x_star.len() {
        return Err(SascError::Shape {
            expected: cert.x_star.len(),
            got: x0.len(),
        });
    }
    Ok(dist(&cert.x_star, x0).powi(2))
}

pub fn constants_case1(
    cfg: &SascConfig,
    norm_bound: f64,
    cert: &CertificateInputs,
    x0: &[f64],
) -> Result<Case1Constants> {
    check_m0(cfg)?;
    let (a0, w, m0) = (cfg.alpha0, cfg.omega, cfg.m0 as f64);
    let r2 = initial_gap_sq(cert, x0)?;
    let a2 = norm_bound * norm_bound;
    let y2 = cert.y_star_norm * cert.y_star_norm;
    let s2 = cert.sigma_f * cert.sigma_f;
    Ok(Case1Constants {
        c1: (m0 * w).sqrt() / (a0 * (m0 - 1.0) * (w - 1.0).sqrt()),
        c2: r2 / 2.0 + 2.0 * a0 * m0 * s2,
        c3: 2.0 * a0 * a0 * a2 * m0 * y2 + 2.0 * a0 * m0 * s2,
        c4: 4.0 * a0 * m0.sqrt() * a2 * w.sqrt() / (w - 1.0).sqrt(),
        y_star_norm: cert.y_star_norm,
    })
}

pub fn constants_case2(
    cfg: &SascConfig,
    norm_bound: f64,
    cert: &CertificateInputs,
    x0: &[f64],
) -> Result<Case2Constants> {
    check_m0(cfg)?;
    let (a0, w, m0) = (cfg.alpha0, cfg.omega, cfg.m0 as f64);
    let r2 = initial_gap_sq(cert, x0)?;
    let a2 = norm_bound * norm_bound;
    let y2 = cert.y_star_norm * cert.y_star_norm;
    let s2 = cert.sigma_f * cert.sigma_f;
    let ratio = w / (w - 1.0);
    Ok(Case2Constants {
        d1: ratio * m0 / (a0 * (m0 - 1.0)) * 0.5 * r2 + 2.0 * a0 * m0 * ratio * s2,
        d2: 2.0 * m0 * m0 * a0 * w / ((m0 - 1.0) * (w - 1.0)) * (a2 * y2 + s2),
        d3: 4.0 * a0 * m0 * a2 * ratio,
        y_star_norm: cert.y_star_norm,
    })
}

/// Predicted bounds after `samples` inner iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub samples: u64,
    pub objective_upper: f64,
    pub objective_lower: f64,
    pub feasibility: f64,
}

/// Evaluates the objective and feasibility bounds at each sample count.
/// With `lipschitz_g`, the smoothing surplus for a Lipschitz nonsmooth term
/// (`C4 L_g^2 / sqrt(M)` or `D3 L_g^2 / M`) is added to the objective bound.
pub fn bound_curves(
    constants: &RateConstants,
    m0: u64,
    omega: f64,
    samples: &[u64],
    lipschitz_g: Option<f64>,
) -> Result<Vec<BoundPoint>> {
    if !(omega > 1.0) || m0 < 1 {
        return Err(SascError::Config("need omega > 1 and m0 >= 1".into()));
    }
    let lg2 = lipschitz_g.map_or(0.0, |l| l * l);
    samples
        .iter()
        .map(|&m| {
            if m < m0 {
                return Err(SascError::InvalidInput(format!(
                    "M = {m} is below m0 = {m0}; no epoch has completed"
                )));
            }
            let mf = m as f64;
            let epochs = (mf / m0 as f64).ln() / omega.ln();
            Ok(match constants {
                RateConstants::Case1(c) => {
                    let core = c.c2 + epochs * c.c3;
                    let rt = mf.sqrt();
                    let main = c.c1 / rt * core;
                    BoundPoint {
                        samples: m,
                        objective_upper: main + c.c4 / rt * lg2,
                        objective_lower: -2.0 * c.c4 / rt * c.y_star_norm.powi(2) - main,
                        feasibility: (2.0 * c.c4 * c.y_star_norm
                            + 2.0 * (c.c1 * c.c4).sqrt() * core.sqrt())
                            / rt,
                    }
                }
                RateConstants::Case2(d) => {
                    let core = d.d1 + epochs * d.d2;
                    let main = core / mf;
                    BoundPoint {
                        samples: m,
                        objective_upper: main + d.d3 / mf * lg2,
                        objective_lower: -2.0 * d.d3 / mf * d.y_star_norm.powi(2) - main,
                        feasibility: (2.0 * d.d3 * d.y_star_norm + 2.0 * d.d3.sqrt() * core.sqrt())
                            / mf,
                    }
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha0: f64, omega: f64, m0: u64) -> SascConfig {
        SascConfig {
            alpha0,
            omega,
            m0,
            ..SascConfig::default()
        }
    }

    #[test]
    fn case1_vanishing_terms() {
        let cert = CertificateInputs::new(vec![0.0, 0.0], 0.0, 0.0, 0.0).unwrap();
        let c = constants_case1(&cfg(1.0, 2.0, 2), 1.0, &cert, &[0.0, 0.0]).unwrap();
        assert_eq!((c.c1, c.c2, c.c3), (2.0, 0.0, 0.0));
        assert!((c.c4 - 8.0).abs() < 1e-14);
        for (a0, w, m0) in [(0.1, 1.2, 3), (2.0, 5.0, 9)] {
            let c = constants_case1(&cfg(a0, w, m0), 1.7, &cert, &[0.0, 0.0]).unwrap();
            assert_eq!((c.c2, c.c3), (0.0, 0.0));
        }
    }

    #[test]
    fn m0_one_is_undefined() {
        let cert = CertificateInputs::new(vec![0.0], 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            constants_case1(&cfg(1.0, 2.0, 1), 1.0, &cert, &[0.0]),
            Err(SascError::UndefinedConstant(_))
        ));
        assert!(matches!(
            constants_case2(&cfg(1.0, 2.0, 1), 1.0, &cert, &[0.0]),
            Err(SascError::UndefinedConstant(_))
        ));
    }

    #[test]
    fn case2_examples() {
        let cert = CertificateInputs::new(vec![0.0], 0.0, 1.0, 1.0).unwrap();
        let d = constants_case2(&cfg(0.5, 2.0, 4), 1.0, &cert, &[0.0]).unwrap();
        assert_eq!(d.d3, 16.0);
        assert!((d.d2 - 64.0 / 3.0).abs() < 1e-12);
        let quiet = CertificateInputs::new(vec![0.3], 0.0, 2.0, 0.0).unwrap();
        assert_eq!(
            constants_case2(&cfg(0.5, 2.0, 4), 1.0, &quiet, &[0.3])
                .unwrap()
                .d1,
            0.0
        );
    }

    #[test]
    fn bound_curve_examples() {
        let c = RateConstants::Case1(Case1Constants {
            c1: 2.0,
            c2: 1.0,
            c3: 0.0,
            c4: 1.0,
            y_star_norm: 0.0,
        });
        let b = bound_curves(&c, 2, 2.0, &[2], None).unwrap();
        assert!((b[0].objective_upper - 2f64.sqrt()).abs() < 1e-15);
        let plain = bound_curves(&c, 2, 2.0, &[2, 64, 4096], None).unwrap();
        let zero = bound_curves(&c, 2, 2.0, &[2, 64, 4096], Some(0.0)).unwrap();
        assert_eq!(plain, zero);
        let surplus = bound_curves(&c, 2, 2.0, &[64], Some(2.0)).unwrap();
        assert!((surplus[0].objective_upper - plain[1].objective_upper - 4.0 / 8.0).abs() < 1e-15);
        assert!(matches!(
            bound_curves(&c, 4, 2.0, &[3], None),
            Err(SascError::InvalidInput(_))
        ));
    }

    #[test]
    fn case2_bound_decreases_over_decades() {
        let cert = CertificateInputs::new(vec![1.0], 0.0, 1.0, 1.0).unwrap();
        let d = constants_case2(&cfg(0.5, 2.0, 4), 1.0, &cert, &[0.0]).unwrap();
        let grid: Vec<u64> = (0..60)
            .map(|k| (4.0 * 1.3f64.powi(k)).round() as u64)
            .collect();
        let tens: Vec<u64> = grid.iter().map(|m| m * 10).collect();
        let rc = RateConstants::Case2(d);
        let b = bound_curves(&rc, 4, 2.0, &grid, None).unwrap();
        let b10 = bound_curves(&rc, 4, 2.0, &tens, None).unwrap();
        for (lo, hi) in b.iter().zip(&b10) {
            assert!(hi.objective_upper <= lo.objective_upper, "M={}", lo.samples);
            assert!(hi.feasibility <= lo.feasibility, "M={}", lo.samples);
        }
    }
}
