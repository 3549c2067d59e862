//! Quantile, deviance and standardized residuals.

use nalgebra::DMatrix;

use crate::distribution::transform;
use crate::error::{PlregError, Result};
use crate::generators::GeneratorKind;
use crate::regression::{score, FitResult};

/// Largest magnitude a quantile residual may take.
pub const QUANTILE_RESIDUAL_CLAMP: f64 = 8.2;

/// A residual vector with a per-observation flag.
///
/// The flag marks clamped values (quantile, deviance) or undefined ones
/// (standardized, stored as `NaN`).
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub values: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl Residuals {
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn n_flagged(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }
}

/// Which residual to compute, e.g. for envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    Quantile,
    Deviance,
    Standardized,
}

impl ResidualKind {
    pub fn name(self) -> &'static str {
        match self {
            ResidualKind::Quantile => "quantile",
            ResidualKind::Deviance => "deviance",
            ResidualKind::Standardized => "standardized",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "quantile" | "q" => Some(ResidualKind::Quantile),
            "deviance" | "d" => Some(ResidualKind::Deviance),
            "standardized" | "p" => Some(ResidualKind::Standardized),
            _ => None,
        }
    }
}

fn check_data(fit: &FitResult, y: &[f64]) -> Result<()> {
    fit.model.check_response(y)
}

/// Fitted z-scores `z̃ᵢ = h(yᵢ; μ̃ᵢ, σ̃ᵢ, λ̃)`.
pub fn fitted_z(fit: &FitResult, y: &[f64]) -> Result<Vec<f64>> {
    check_data(fit, y)?;
    let lambda = fit.lambda();
    Ok(y.iter()
        .zip(fit.mu.iter().zip(fit.sigma.iter()))
        .map(|(&yi, (&m, &s))| (transform(lambda, yi) - transform(lambda, m)) / s)
        .collect())
}

/// `rᵢ^q = Φ^{-1}[R(z̃ᵢ)]`, clamped to `±8.2`.
pub fn quantile_residual(fit: &FitResult, y: &[f64]) -> Result<Residuals> {
    let z = fitted_z(fit, y)?;
    let gen = &fit.model.generator;
    let mut values = Vec::with_capacity(z.len());
    let mut flagged = Vec::with_capacity(z.len());
    for zi in z {
        let r = gen.normal_score(zi);
        if r.is_finite() && r.abs() <= QUANTILE_RESIDUAL_CLAMP {
            values.push(r);
            flagged.push(false);
        } else {
            let sign = if r.is_nan() { zi.signum() } else { r.signum() };
            values.push(sign * QUANTILE_RESIDUAL_CLAMP);
            flagged.push(true);
        }
    }
    Ok(Residuals { values, flagged })
}

/// `rᵢ^d = sign(z̃ᵢ) √(2 log[r(0)/r(z̃ᵢ²)])`; negative logs are set to 0
/// and flagged.
pub fn deviance_residual(fit: &FitResult, y: &[f64]) -> Result<Residuals> {
    let z = fitted_z(fit, y)?;
    let gen = &fit.model.generator;
    if gen.kind() == GeneratorKind::Normal {
        let n = z.len();
        return Ok(Residuals {
            values: z,
            flagged: vec![false; n],
        });
    }
    let log_r0 = gen.log_r(0.0);
    if !log_r0.is_finite() {
        return Err(PlregError::Domain("r(0) is not finite for this generator".into()));
    }
    let mut values = Vec::with_capacity(z.len());
    let mut flagged = Vec::with_capacity(z.len());
    for zi in z {
        let drop = log_r0 - gen.log_r(zi * zi);
        if drop >= 0.0 {
            values.push(if zi == 0.0 { 0.0 } else { zi.signum() * (2.0 * drop).sqrt() });
            flagged.push(false);
        } else {
            values.push(0.0);
            flagged.push(true);
        }
    }
    Ok(Residuals { values, flagged })
}

/// Diagonal of `H = Σ^{-1/2} D (DᵀΣ⁻¹D)⁻¹ DᵀΣ^{-1/2}`, `D = σμ*T₁X`.
pub fn hat_diag(fit: &FitResult, y: &[f64]) -> Result<Vec<f64>> {
    check_data(fit, y)?;
    let sw = score(&fit.theta, &fit.model, y)?;
    let x = fit.model.x();
    let (n, p) = x.shape();
    // Σ^{-1/2} D = diag(μ* t₁) X
    let m = DMatrix::from_fn(n, p, |i, j| sw.mu_star[i] * sw.t1[i] * x[(i, j)]);
    let qr = m.qr();
    let r = qr.r();
    if (0..p).any(|j| r[(j, j)].abs() <= f64::EPSILON * 1e3 * r.amax()) {
        return Err(PlregError::Singular("hat matrix weights are rank deficient".into()));
    }
    let q = qr.q();
    Ok((0..n).map(|i| q.row(i).norm_squared()).collect())
}

/// `rᵢ^p = (ỹᵢ† - μ̃ᵢ†) / (σ̃ᵢ √(ξ_r(1 - hᵢᵢ/(d_r ξ_r))))`, together with
/// `hᵢᵢ`.
pub fn standardized_residual(fit: &FitResult, y: &[f64]) -> Result<(Residuals, Vec<f64>)> {
    let h = hat_diag(fit, y)?;
    let z = fitted_z(fit, y)?;
    let c = fit.model.generator.constants()?;
    let (xi, d) = (c.xi_r, c.d_r);
    let mut values = Vec::with_capacity(z.len());
    let mut flagged = Vec::with_capacity(z.len());
    for (zi, hi) in z.iter().zip(&h) {
        let factor = 1.0 - hi / (d * xi);
        if factor > 0.0 {
            values.push(zi / (xi * factor).sqrt());
            flagged.push(false);
        } else {
            values.push(f64::NAN);
            flagged.push(true);
        }
    }
    Ok((Residuals { values, flagged }, h))
}

/// Residuals of the requested kind.
pub fn residuals(fit: &FitResult, y: &[f64], kind: ResidualKind) -> Result<Residuals> {
    match kind {
        ResidualKind::Quantile => quantile_residual(fit, y),
        ResidualKind::Deviance => deviance_residual(fit, y),
        ResidualKind::Standardized => standardized_residual(fit, y).map(|(r, _)| r),
    }
}
