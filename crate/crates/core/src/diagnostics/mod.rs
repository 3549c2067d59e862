//! Residuals, local influence, generalized leverage, simulated envelopes and
//! goodness of fit for a fitted power logit regression.

mod envelope;
mod influence;
mod leverage;
mod residuals;

pub use envelope::{simulated_envelope, simulated_envelope_with, Envelope, MAX_ENVELOPE_FAILURE_RATE};
pub use influence::{delta_matrix, local_influence, LocalInfluence, PerturbationScheme};
pub use leverage::{generalized_leverage, generalized_leverage_matrix};
pub use residuals::{
    deviance_residual, fitted_z, hat_diag, quantile_residual, residuals, standardized_residual, ResidualKind,
    Residuals, QUANTILE_RESIDUAL_CLAMP,
};

use crate::error::Result;
use crate::regression::fit::pseudo_r2;
use crate::regression::{upsilon, FitResult};

/// Pseudo R² and Υ at the fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitStatistics {
    pub pseudo_r2: f64,
    pub upsilon: f64,
}

/// Squared correlation between `d₁(μ̃)` and `d₁(y)`, and Υ of the fitted
/// z-scores.
pub fn fit_statistics(fit: &FitResult, y: &[f64]) -> Result<FitStatistics> {
    let z = fitted_z(fit, y)?;
    Ok(FitStatistics {
        pseudo_r2: pseudo_r2(&fit.model, y, &fit.mu),
        upsilon: upsilon(&z, &fit.model.generator),
    })
}

/// What [`diagnose`] computes beyond residuals and leverages.
#[derive(Debug, Clone)]
pub struct DiagnosticsOptions {
    pub schemes: Vec<PerturbationScheme>,
    /// `(kind, n_sim, seed)`.
    pub envelope: Option<(ResidualKind, usize, u64)>,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            schemes: vec![PerturbationScheme::CaseWeights],
            envelope: None,
        }
    }
}

/// All per-observation diagnostics of a fit.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    pub r_q: Residuals,
    pub r_d: Residuals,
    pub r_p: Residuals,
    pub gl_diag: Vec<f64>,
    pub hat_diag: Vec<f64>,
    pub influence: Vec<LocalInfluence>,
    pub envelope: Option<Envelope>,
    pub fit_stats: FitStatistics,
}

pub fn diagnose(fit: &FitResult, y: &[f64], opts: &DiagnosticsOptions) -> Result<DiagnosticsReport> {
    let r_q = quantile_residual(fit, y)?;
    let r_d = deviance_residual(fit, y)?;
    let (r_p, hat) = match standardized_residual(fit, y) {
        Ok(v) => v,
        // generator constants undefined at this ζ
        Err(e) if !e.is_numerical() => {
            let h = hat_diag(fit, y)?;
            let n = h.len();
            (
                Residuals {
                    values: vec![f64::NAN; n],
                    flagged: vec![true; n],
                },
                h,
            )
        }
        Err(e) => return Err(e),
    };
    let gl_diag = generalized_leverage(fit, y)?;
    let influence = opts
        .schemes
        .iter()
        .map(|&s| local_influence(fit, y, s))
        .collect::<Result<Vec<_>>>()?;
    let envelope = match opts.envelope {
        Some((kind, n_sim, seed)) => Some(simulated_envelope(fit, y, kind, n_sim, seed)?),
        None => None,
    };
    Ok(DiagnosticsReport {
        r_q,
        r_d,
        r_p,
        gl_diag,
        hat_diag: hat,
        influence,
        envelope,
        fit_stats: fit_statistics(fit, y)?,
    })
}
