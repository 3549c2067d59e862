//! Simulated envelopes for ordered residuals.

use rayon::prelude::*;

use crate::diagnostics::residuals::{residuals, ResidualKind};
use crate::error::{PlregError, Result};
use crate::regression::{fit_with, FitOptions, FitResult, ZetaPolicy};
use crate::simharness::{replicate_rng, simulate_response};

/// Largest tolerated share of failed refits.
pub const MAX_ENVELOPE_FAILURE_RATE: f64 = 0.2;

/// Per-rank 2.5%, 50% and 97.5% quantiles of simulated ordered residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub kind: ResidualKind,
    pub lower: Vec<f64>,
    pub median: Vec<f64>,
    pub upper: Vec<f64>,
    /// Successful simulations.
    pub n_sim: usize,
    pub failures: usize,
}

impl Envelope {
    /// Number of ordered observed residuals outside the band.
    pub fn count_outside(&self, observed: &[f64]) -> usize {
        let mut sorted = observed.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .filter(|(v, (lo, hi))| **v < **lo || **v > **hi)
            .count()
    }
}

/// Type-7 sample quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Simulates `n_sim` responses from the fitted model, refits each (warm
/// start at the fit, ζ fixed) and summarises the sorted residuals by rank.
///
/// Undefined standardized residuals make the replicate count as failed.
pub fn simulated_envelope(
    fit: &FitResult,
    y: &[f64],
    kind: ResidualKind,
    n_sim: usize,
    seed: u64,
) -> Result<Envelope> {
    simulated_envelope_with(fit, y, kind, n_sim, seed, &FitOptions::default())
}

pub fn simulated_envelope_with(
    fit: &FitResult,
    y: &[f64],
    kind: ResidualKind,
    n_sim: usize,
    seed: u64,
    opts: &FitOptions,
) -> Result<Envelope> {
    fit.model.check_response(y)?;
    if n_sim == 0 {
        return Err(PlregError::Usage("the envelope needs at least one simulation".into()));
    }
    let mut model = fit.model.clone();
    model.zeta_policy = ZetaPolicy::Fixed;
    let runs: Vec<Option<Vec<f64>>> = (0..n_sim)
        .into_par_iter()
        .map(|index| {
            let mut rng = replicate_rng(seed, index as u64);
            let ys = simulate_response(&model, &fit.theta, &mut rng).ok()?;
            let refit = fit_with(&model, &ys, Some(&fit.theta), opts).ok()?;
            let r = residuals(&refit, &ys, kind).ok()?;
            if r.values.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let mut v = r.values;
            v.sort_by(f64::total_cmp);
            Some(v)
        })
        .collect();
    let ok: Vec<Vec<f64>> = runs.into_iter().flatten().collect();
    let failures = n_sim - ok.len();
    if ok.is_empty() || failures as f64 > MAX_ENVELOPE_FAILURE_RATE * n_sim as f64 {
        return Err(PlregError::TooManyFailures {
            failed: failures,
            total: n_sim,
        });
    }
    let n = y.len();
    let mut lower = Vec::with_capacity(n);
    let mut median = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut column = vec![0.0; ok.len()];
    for rank in 0..n {
        for (c, run) in column.iter_mut().zip(&ok) {
            *c = run[rank];
        }
        column.sort_by(f64::total_cmp);
        lower.push(quantile_sorted(&column, 0.025));
        median.push(quantile_sorted(&column, 0.5));
        upper.push(quantile_sorted(&column, 0.975));
    }
    Ok(Envelope {
        kind,
        lower,
        median,
        upper,
        n_sim: ok.len(),
        failures,
    })
}
