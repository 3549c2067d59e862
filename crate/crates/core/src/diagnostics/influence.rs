//! Local influence: Δ matrices for four perturbation schemes, the dominant
//! curvature direction `hmax` and the total local influence `Cᵢ`.
//!
//! λ is held at its estimate, so `θ = (β, τ)` throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{PlregError, Result};
use crate::regression::{score, FitResult, ModelSpec, ScoreAndWeights};

/// How the model is perturbed by `ω ∈ ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationScheme {
    /// `ℓ(θ|ω) = Σ ωᵢ ℓᵢ(θ)`, `ω₀ = 1`.
    CaseWeights,
    /// `x_{ij} ↦ x_{ij} + ωᵢ s_{x_j}`, `ω₀ = 0`.
    MedianCovariate(usize),
    /// `s_{ik} ↦ s_{ik} + ωᵢ s_{s_k}`, `ω₀ = 0`.
    DispersionCovariate(usize),
    /// Both of the above with the same ω.
    Simultaneous(usize, usize),
}

impl PerturbationScheme {
    pub fn name(&self) -> String {
        match self {
            PerturbationScheme::CaseWeights => "case".into(),
            PerturbationScheme::MedianCovariate(j) => format!("median:{j}"),
            PerturbationScheme::DispersionCovariate(k) => format!("dispersion:{k}"),
            PerturbationScheme::Simultaneous(j, k) => format!("simultaneous:{j}:{k}"),
        }
    }

    /// Like [`name`](Self::name) with column indices replaced by the
    /// model's covariate names.
    pub fn label(&self, model: &ModelSpec) -> String {
        let m = |j: usize| model.median_names.get(j).cloned().unwrap_or_else(|| j.to_string());
        let d = |k: usize| model.dispersion_names.get(k).cloned().unwrap_or_else(|| k.to_string());
        match *self {
            PerturbationScheme::CaseWeights => "case".into(),
            PerturbationScheme::MedianCovariate(j) => format!("median:{}", m(j)),
            PerturbationScheme::DispersionCovariate(k) => format!("dispersion:{}", d(k)),
            PerturbationScheme::Simultaneous(j, k) => format!("simultaneous:{}:{}", m(j), d(k)),
        }
    }
}

/// `hmax` and `Cᵢ` for one scheme.
#[derive(Debug, Clone)]
pub struct LocalInfluence {
    pub scheme: PerturbationScheme,
    pub hmax: Vec<f64>,
    pub c: Vec<f64>,
    /// Eigenvalue of `B` belonging to `hmax`.
    pub eigenvalue: f64,
}

fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn continuous_column(m: &DMatrix<f64>, j: usize, names: &[String], which: &str) -> Result<f64> {
    if j >= m.ncols() {
        return Err(PlregError::Usage(format!(
            "{which} design has {} columns, no column {j}",
            m.ncols()
        )));
    }
    let col: Vec<f64> = m.column(j).iter().cloned().collect();
    let mut distinct = col.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= 2 {
        return Err(PlregError::Usage(format!(
            "{which} covariate `{}` is not continuous and cannot be perturbed",
            names.get(j).map(String::as_str).unwrap_or("?")
        )));
    }
    Ok(sample_sd(&col))
}

/// `(ℓ_{η₁η₁}, ℓ_{η₁η₂}, ℓ_{η₂η₂})` per observation.
fn second_derivatives(sw: &ScoreAndWeights, i: usize) -> (f64, f64, f64) {
    (
        -sw.w1[i] * sw.t1[i],
        -sw.w4[i] * sw.t1[i] * sw.t2[i],
        -sw.w2[i] * sw.t2[i],
    )
}

/// The `(p + q) × n` matrix `Δ = ∂²ℓ(θ|ω)/∂θ∂ωᵀ` at `ω₀`.
pub fn delta_matrix(fit: &FitResult, y: &[f64], scheme: PerturbationScheme) -> Result<DMatrix<f64>> {
    fit.model.check_response(y)?;
    let model = &fit.model;
    let sw = score(&fit.theta, model, y)?;
    let (x, s) = (model.x(), model.s());
    let (n, p, q) = (model.n(), model.p(), model.q());
    let mut delta = DMatrix::zeros(p + q, n);
    // first derivatives ℓ_{η₁}, ℓ_{η₂}
    let l1 = |i: usize| sw.w[i] * sw.t1[i] * sw.mu_star[i];
    let l2 = |i: usize| sw.t2[i] * sw.sigma_star[i];
    let add_median = |delta: &mut DMatrix<f64>, j: usize| -> Result<()> {
        let sd = continuous_column(x, j, &model.median_names, "median")?;
        let bj = fit.theta.beta[j];
        for i in 0..n {
            let (a11, a12, _) = second_derivatives(&sw, i);
            for r in 0..p {
                delta[(r, i)] += sd * bj * a11 * x[(i, r)];
            }
            delta[(j, i)] += sd * l1(i);
            for r in 0..q {
                delta[(p + r, i)] += sd * bj * a12 * s[(i, r)];
            }
        }
        Ok(())
    };
    let add_dispersion = |delta: &mut DMatrix<f64>, k: usize| -> Result<()> {
        let sd = continuous_column(s, k, &model.dispersion_names, "dispersion")?;
        let tk = fit.theta.tau[k];
        for i in 0..n {
            let (_, a12, a22) = second_derivatives(&sw, i);
            for r in 0..p {
                delta[(r, i)] += sd * tk * a12 * x[(i, r)];
            }
            for r in 0..q {
                delta[(p + r, i)] += sd * tk * a22 * s[(i, r)];
            }
            delta[(p + k, i)] += sd * l2(i);
        }
        Ok(())
    };
    match scheme {
        PerturbationScheme::CaseWeights => {
            for i in 0..n {
                for r in 0..p {
                    delta[(r, i)] = x[(i, r)] * l1(i);
                }
                for r in 0..q {
                    delta[(p + r, i)] = s[(i, r)] * l2(i);
                }
            }
        }
        PerturbationScheme::MedianCovariate(j) => add_median(&mut delta, j)?,
        PerturbationScheme::DispersionCovariate(k) => add_dispersion(&mut delta, k)?,
        PerturbationScheme::Simultaneous(j, k) => {
            add_median(&mut delta, j)?;
            add_dispersion(&mut delta, k)?;
        }
    }
    Ok(delta)
}

/// Inverse of the observed information restricted to `(β, τ)`.
fn restricted_inverse(fit: &FitResult, y: &[f64]) -> Result<DMatrix<f64>> {
    let sw = score(&fit.theta, &fit.model, y)?;
    let j = sw.information(&fit.model, false);
    j.try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or_else(|| PlregError::Singular("observed information for (beta, tau) is singular".into()))
}

/// `hmax` and `Cᵢ = 2|Δᵢᵀ J⁻¹ Δᵢ|` of `B = Δᵀ J⁻¹ Δ`.
pub fn local_influence(fit: &FitResult, y: &[f64], scheme: PerturbationScheme) -> Result<LocalInfluence> {
    let delta = delta_matrix(fit, y, scheme)?;
    let jinv = restricted_inverse(fit, y)?;
    let a = (&jinv + jinv.transpose()) * 0.5;
    let n = delta.ncols();
    let c: Vec<f64> = (0..n)
        .map(|i| {
            let d = delta.column(i);
            2.0 * (d.transpose() * &a * d)[(0, 0)].abs()
        })
        .collect();
    // B = Q (R A Rᵀ) Qᵀ with Δᵀ = QR, so its nonzero spectrum is that of
    // the small symmetric core
    let qr = delta.transpose().qr();
    let (qm, r) = (qr.q(), qr.r());
    let core = &r * &a * r.transpose();
    let core = (&core + core.transpose()) * 0.5;
    let eig = SymmetricEigen::new(core);
    let (mut best, mut best_abs) = (0, -1.0);
    for (k, v) in eig.eigenvalues.iter().enumerate() {
        if v.abs() > best_abs {
            best = k;
            best_abs = v.abs();
        }
    }
    let mut h: DVector<f64> = &qm * eig.eigenvectors.column(best);
    let norm = h.norm();
    if !(norm > 0.0) {
        return Err(PlregError::Singular("the curvature matrix vanishes".into()));
    }
    h /= norm;
    let scale = h.amax();
    if let Some(first) = h.iter().find(|v| v.abs() > 1e-10 * scale) {
        if *first < 0.0 {
            h = -h;
        }
    }
    Ok(LocalInfluence {
        scheme,
        hmax: h.iter().cloned().collect(),
        c,
        eigenvalue: eig.eigenvalues[best],
    })
}
