//! Epoch schedules and the parameter inequalities they must satisfy.

use crate::error::{Result, SascError};
use crate::sasc::{Case, SascConfig};

/// Parameters of epoch `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochParams {
    pub alpha: f64,
    pub beta: f64,
    pub m: u64,
}

/// `floor(m0 * omega^s)` in floating point; saturates nothing.
pub fn epoch_length(m0: u64, omega: f64, s: usize) -> f64 {
    (m0 as f64 * omega.powi(s as i32)).floor()
}

/// Step size of epoch `s`: `alpha0 omega^{-s/2}` (general convex) or
/// `alpha0 omega^{-s}` (restricted strongly convex).
pub fn epoch_step(case: Case, alpha0: f64, omega: f64, s: usize) -> f64 {
    match case {
        Case::GeneralConvex => alpha0 * omega.powf(-(s as f64) / 2.0),
        Case::RestrictedStronglyConvex => alpha0 * omega.powf(-(s as f64)),
    }
}

/// Checks the restricted-strong-convexity requirement `m0 >= omega / (mu alpha0)`.
pub fn check_case2(m0: u64, omega: f64, alpha0: f64, mu: Option<f64>) -> Result<()> {
    let mu =
        mu.ok_or_else(|| SascError::Config("restricted strongly convex case needs mu".into()))?;
    if !(mu > 0.0) {
        return Err(SascError::Config(format!("mu must be positive, got {mu}")));
    }
    let need = omega / (mu * alpha0);
    if (m0 as f64) < need * (1.0 - 1e-12) {
        return Err(SascError::Config(format!(
            "m0 = {m0} is below omega / (mu alpha0) = {need}"
        )));
    }
    Ok(())
}

/// `(alpha_s, beta_s, m_s)` with `beta_s = 4 alpha_s norm_bound^2` and
/// `m_s = floor(m0 omega^s)`.
pub fn schedule_params(
    case: Case,
    s: usize,
    cfg: &SascConfig,
    norm_bound: f64,
    mu: Option<f64>,
) -> Result<EpochParams> {
    if case == Case::RestrictedStronglyConvex {
        check_case2(cfg.m0, cfg.omega, cfg.alpha0, mu)?;
    }
    let alpha = epoch_step(case, cfg.alpha0, cfg.omega, s);
    let beta = alpha * (4.0 * norm_bound * norm_bound);
    // `as` saturates at u64::MAX for lengths beyond any practical budget.
    let m = epoch_length(cfg.m0, cfg.omega, s) as u64;
    Ok(EpochParams { alpha, beta, m })
}

/// Worst observed slack of one inequality over the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalitySlack {
    pub name: &'static str,
    /// Minimum of `rhs - lhs`.
    pub worst: f64,
    /// Minimum of `(rhs - lhs) / max(|lhs|, |rhs|)`, zero when both vanish.
    pub worst_relative: f64,
    pub at_epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub case: Case,
    pub entries: Vec<InequalitySlack>,
}

impl InequalityReport {
    pub fn min_slack(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.worst)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn get(&self, name: &str) -> Option<&InequalitySlack> {
        self.entries.iter().find(|e| e.name == name)
    }
}

struct Tracker {
    entries: Vec<InequalitySlack>,
}

impl Tracker {
    fn record(&mut self, name: &'static str, s: usize, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs());
        let rel = if scale == 0.0 { 0.0 } else { slack / scale };
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => {
                if slack < e.worst {
                    e.worst = slack;
                    e.at_epoch = s;
                }
                e.worst_relative = e.worst_relative.min(rel);
            }
            None => self.entries.push(InequalitySlack {
                name,
                worst: slack,
                worst_relative: rel,
                at_epoch: s,
            }),
        }
    }
}

/// Evaluates every parameter inequality used by the rate analysis for
/// `s = 0..=s_max`, together with the two step-size conditions.
///
/// General convex case:
/// `beta_s <= 4 a0 sqrt(m0) |A|^2 sqrt(w/(w-1)) / sqrt(M_s)`,
/// `alpha_s m_s >= a0 (m0-1)/sqrt(m0) sqrt((w-1)/w) sqrt(M_s)`,
/// `sum_{l<s} beta_l alpha_l m_l <= 4 a0^2 |A|^2 m0 log(M_s/m0)/log(w)`,
/// `sum_{l<=s} alpha_l^2 m_l <= a0 m0 (log(M_s/m0)/log(w) + 1)`.
///
/// Restricted strongly convex case, with `c = 1/w`:
/// `beta_s <= 4 a0 m0 |A|^2 (w/(w-1)) / M_s`, `alpha_s m_s >= a0 (m0-1)`,
/// `sum_{l<s} c^{s-l} beta_l alpha_l m_l <= 4 c^s a0^2 |A|^2 m0 log(M_s/m0)/log(w)`,
/// `sum_{l<s} c^{s-l} alpha_l^2 m_l <= c^s a0^2 m0 log(M_s/m0)/log(w)`,
/// `c^s <= (w/(w-1)) m0 / M_s`.
///
/// Step-size conditions: `2 alpha_s |A|^2 - beta_s/2 <= 0` and
/// `(L + |A|^2/beta_s)/2 - 1/(2 alpha_s) <= 0`.
pub fn schedule_inequalities_check(
    case: Case,
    cfg: &SascConfig,
    norm_bound: f64,
    lipschitz_grad: f64,
    s_max: usize,
) -> Result<InequalityReport> {
    if s_max < 1 {
        return Err(SascError::InvalidInput("s_max must be at least 1".into()));
    }
    if !(cfg.omega > 1.0) || cfg.m0 < 1 || !(cfg.alpha0 > 0.0) {
        return Err(SascError::Config(
            "need omega > 1, m0 >= 1 and alpha0 > 0".into(),
        ));
    }
    let (a0, w, m0f) = (cfg.alpha0, cfg.omega, cfg.m0 as f64);
    let a2 = norm_bound * norm_bound;
    let logw = w.ln();
    let c = 1.0 / w;

    let alphas: Vec<f64> = (0..=s_max).map(|s| epoch_step(case, a0, w, s)).collect();
    let betas: Vec<f64> = alphas.iter().map(|a| a * (4.0 * a2)).collect();
    let ms: Vec<f64> = (0..=s_max).map(|s| epoch_length(cfg.m0, w, s)).collect();

    let mut t = Tracker {
        entries: Vec::new(),
    };
    let mut big_m = 0.0;
    for s in 0..=s_max {
        big_m += ms[s];
        let (alpha, beta, m) = (alphas[s], betas[s], ms[s]);
        let log_ratio = (big_m / m0f).ln() / logw;
        match case {
            Case::GeneralConvex => {
                let beta_rhs = 4.0 * a0 * m0f.sqrt() * a2 * (w / (w - 1.0)).sqrt() / big_m.sqrt();
                t.record("beta_bound", s, beta, beta_rhs);
                let am_rhs = a0 * (m0f - 1.0) / m0f.sqrt() * ((w - 1.0) / w).sqrt() * big_m.sqrt();
                t.record("alpha_m_lower", s, am_rhs, alpha * m);
                let sum_bam: f64 = (0..s).map(|l| betas[l] * alphas[l] * ms[l]).sum();
                t.record(
                    "sum_beta_alpha_m",
                    s,
                    sum_bam,
                    4.0 * a0 * a0 * a2 * m0f * log_ratio,
                );
                let sum_a2m: f64 = (0..=s).map(|l| alphas[l] * alphas[l] * ms[l]).sum();
                t.record("sum_alpha_sq_m", s, sum_a2m, a0 * m0f * (log_ratio + 1.0));
            }
            Case::RestrictedStronglyConvex => {
                let beta_rhs = 4.0 * a0 * m0f * a2 * (w / (w - 1.0)) / big_m;
                t.record("beta_bound", s, beta, beta_rhs);
                t.record("alpha_m_lower", s, a0 * (m0f - 1.0), alpha * m);
                let cs = c.powi(s as i32);
                let sum_bam: f64 = (0..s)
                    .map(|l| c.powi((s - l) as i32) * betas[l] * alphas[l] * ms[l])
                    .sum();
                t.record(
                    "sum_beta_alpha_m",
                    s,
                    sum_bam,
                    4.0 * cs * a0 * a0 * a2 * m0f * log_ratio,
                );
                let sum_a2m: f64 = (0..s)
                    .map(|l| c.powi((s - l) as i32) * alphas[l] * alphas[l] * ms[l])
                    .sum();
                t.record("sum_alpha_sq_m", s, sum_a2m, cs * a0 * a0 * m0f * log_ratio);
                t.record("contraction", s, cs, w / (w - 1.0) * m0f / big_m);
            }
        }
        t.record("step_penalty", s, 2.0 * alpha * a2, beta / 2.0);
        t.record(
            "step_smooth",
            s,
            (lipschitz_grad + a2 / beta) / 2.0,
            1.0 / (2.0 * alpha),
        );
    }
    Ok(InequalityReport {
        case,
        entries: t.entries,
    })
}
