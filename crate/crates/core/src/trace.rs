//! Per-checkpoint convergence records.

/// One checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// Number of constraint/objective samples consumed so far.
    pub samples: u64,
    pub epoch: usize,
    pub objective: f64,
    pub feasibility: f64,
    pub beta: f64,
    pub alpha: f64,
    pub dist_to_ref: Option<f64>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|l| l.samples < r.samples));
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Least-squares slope of `log(feasibility)` against `log(samples)` over
    /// records with at least `min_samples` samples and positive feasibility.
    pub fn feasibility_slope(&self, min_samples: u64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .records
            .iter()
            .filter(|r| r.samples >= min_samples && r.feasibility > 0.0)
            .map(|r| ((r.samples as f64).ln(), r.feasibility.ln()))
            .collect();
        log_log_slope(&pts)
    }

    /// Feasibility at the last record with `samples <= at`.
    pub fn feasibility_at(&self, at: u64) -> Option<f64> {
        self.records
            .iter()
            .rev()
            .find(|r| r.samples <= at)
            .map(|r| r.feasibility)
    }
}

/// Ordinary least-squares slope through `(x, y)` points.
pub fn log_log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
