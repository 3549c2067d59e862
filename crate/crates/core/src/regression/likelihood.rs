//! Log-likelihood, score and observed information of the power logit
//! regression model.
//!
//! Parameters are ordered `θ = (β, τ, λ)`. When λ is held fixed the λ
//! entries are dropped from the score and the information matrix.

use nalgebra::{DMatrix, DVector};

use crate::distribution::ln_one_minus_pow;
use crate::error::{PlregError, Result};
use crate::regression::model::ModelSpec;

/// Parameter vector `(β, τ, λ)`; `λ = 0` is the log-log model.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta {
    pub beta: DVector<f64>,
    pub tau: DVector<f64>,
    pub lambda: f64,
}

impl Theta {
    pub fn new(beta: DVector<f64>, tau: DVector<f64>, lambda: f64) -> Self {
        Self { beta, tau, lambda }
    }

    /// Stacks `(β, τ)` and, if `with_lambda`, λ.
    pub fn to_vector(&self, with_lambda: bool) -> DVector<f64> {
        let p = self.beta.len();
        let q = self.tau.len();
        let k = p + q + usize::from(with_lambda);
        DVector::from_fn(k, |i, _| {
            if i < p {
                self.beta[i]
            } else if i < p + q {
                self.tau[i - p]
            } else {
                self.lambda
            }
        })
    }

    /// Inverse of [`to_vector`](Self::to_vector); `lambda` is used when the
    /// vector carries no λ entry.
    pub fn from_vector(v: &DVector<f64>, p: usize, q: usize, lambda: f64) -> Self {
        let beta = v.rows(0, p).into_owned();
        let tau = v.rows(p, q).into_owned();
        let lambda = if v.len() > p + q { v[p + q] } else { lambda };
        Self { beta, tau, lambda }
    }
}

/// Per-observation pieces of the score and the Hessian weights.
///
/// With `g = z v(z)`, `T₁ = diag(dμ/dη₁)`, `T₂ = diag(dσ/dη₂)`:
/// `U_β = Xᵀ W T₁ μ*`, `U_τ = Sᵀ T₂ σ*`, `U_λ = 1ᵀ λ*`, and the observed
/// information is `J_ββ = XᵀW₁T₁X`, `J_ττ = SᵀW₂T₂S`, `J_λλ = 1ᵀW₃1`,
/// `J_βτ = XᵀW₄T₁T₂S`, `J_βλ = XᵀW₅T₁1`, `J_τλ = SᵀW₆T₂1`.
#[derive(Debug, Clone)]
pub struct ScoreAndWeights {
    pub u_beta: DVector<f64>,
    pub u_tau: DVector<f64>,
    /// `NaN` for the log-log model, where λ is not a parameter.
    pub u_lambda: f64,
    pub mu: DVector<f64>,
    pub sigma: DVector<f64>,
    pub z: DVector<f64>,
    pub mu_star: DVector<f64>,
    pub sigma_star: DVector<f64>,
    pub lambda_star: DVector<f64>,
    /// `W = diag(z v(z))`.
    pub w: DVector<f64>,
    pub t1: DVector<f64>,
    pub t2: DVector<f64>,
    pub w1: DVector<f64>,
    pub w2: DVector<f64>,
    pub w3: DVector<f64>,
    pub w4: DVector<f64>,
    pub w5: DVector<f64>,
    pub w6: DVector<f64>,
    /// d/dz of `z v(z)`.
    pub dzv: DVector<f64>,
    /// `A = ∂[t(y) - t(μ)]/∂λ`.
    pub a: DVector<f64>,
    pub loglik: f64,
}

/// Transform derivatives at one point.
struct TransformTerms {
    // t(x)
    t: f64,
    // t'(x)
    dt: f64,
    // t''(x)
    ddt: f64,
    // ∂t(x)/∂λ
    dl: f64,
    // ∂²t(x)/∂λ²
    dll: f64,
    // ∂t'(x)/∂λ
    dtl: f64,
}

fn transform_terms(lambda: f64, x: f64, ln_x: f64) -> TransformTerms {
    if lambda == 0.0 {
        let q = x * ln_x;
        TransformTerms {
            t: -(-ln_x).ln(),
            dt: -1.0 / q,
            ddt: (1.0 + ln_x) / (q * q),
            dl: f64::NAN,
            dll: f64::NAN,
            dtl: f64::NAN,
        }
    } else {
        let xl = (lambda * ln_x).exp();
        let om = -(lambda * ln_x).exp_m1();
        TransformTerms {
            t: lambda * ln_x - ln_one_minus_pow(lambda, ln_x),
            dt: lambda / (x * om),
            ddt: -lambda * (1.0 - (1.0 + lambda) * xl) / (x * x * om * om),
            dl: ln_x / om,
            dll: xl * ln_x * ln_x / (om * om),
            dtl: (om + lambda * xl * ln_x) / (x * om * om),
        }
    }
}

/// Everything the score/Hessian assembly needs for one observation.
struct ObsTerms {
    ll: f64,
    mu: f64,
    sigma: f64,
    z: f64,
    g: f64,
    gp: f64,
    t1: f64,
    t2: f64,
    mu_star: f64,
    sigma_star: f64,
    lambda_star: f64,
    a: f64,
    w1: f64,
    w2: f64,
    w3: f64,
    w4: f64,
    w5: f64,
    w6: f64,
}

fn infeasible(what: &str, i: usize, v: f64) -> PlregError {
    PlregError::Domain(format!("{what} of observation {i} is {v}, outside its domain"))
}

fn obs_terms(model: &ModelSpec, theta: &Theta, y: &[f64], i: usize, derivatives: bool) -> Result<ObsTerms> {
    let lambda = theta.lambda;
    let eta1 = model.x().row(i).dot(&theta.beta.transpose());
    let eta2 = model.s().row(i).dot(&theta.tau.transpose());
    let mu = model.median_link.inverse(eta1);
    if !(mu > 0.0 && mu < 1.0) {
        return Err(infeasible("median", i, mu));
    }
    let sigma = model
        .dispersion_link
        .inverse(eta2)
        .ok_or_else(|| infeasible("dispersion predictor", i, eta2))?;
    let yi = y[i];
    let ln_y = yi.ln();
    let ln_mu = mu.ln();
    let ty = transform_terms(lambda, yi, ln_y);
    let tm = transform_terms(lambda, mu, ln_mu);
    let z = (ty.t - tm.t) / sigma;
    let gen = &model.generator;
    let jac = if lambda == 0.0 {
        -sigma.ln() - ln_y - (-ln_y).ln()
    } else {
        lambda.ln() - sigma.ln() - ln_y - ln_one_minus_pow(lambda, ln_y)
    };
    let ll = jac + gen.log_r(z * z);
    if !ll.is_finite() {
        return Err(infeasible("log density", i, ll));
    }
    if !derivatives {
        return Ok(ObsTerms {
            ll,
            mu,
            sigma,
            z,
            g: f64::NAN,
            gp: f64::NAN,
            t1: f64::NAN,
            t2: f64::NAN,
            mu_star: f64::NAN,
            sigma_star: f64::NAN,
            lambda_star: f64::NAN,
            a: f64::NAN,
            w1: f64::NAN,
            w2: f64::NAN,
            w3: f64::NAN,
            w4: f64::NAN,
            w5: f64::NAN,
            w6: f64::NAN,
        });
    }
    let wt = gen.weights(z);
    let (g, gp) = (wt.zv, wt.dzv);
    let (d1, dd1) = model.median_link.derivatives(mu);
    let (d2, dd2) = model.dispersion_link.derivatives(sigma);
    let t1 = 1.0 / d1;
    let t2 = 1.0 / d2;
    let mu_star = tm.dt / sigma;
    let sigma_star = (z * g - 1.0) / sigma;
    let s2 = sigma * sigma;
    let w1 = (gp * mu_star * mu_star - g * tm.ddt / sigma) * t1 + g * mu_star * dd1 * t1 * t1;
    let w2 = -(1.0 - 2.0 * z * g - z * z * gp) / s2 * t2 + sigma_star * dd2 * t2 * t2;
    let w4 = mu_star * (g + z * gp) / sigma;
    let (a, lambda_star, w3, w5, w6) = if lambda == 0.0 {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let a = ty.dl - tm.dl;
        let yl = (lambda * ln_y).exp();
        let om_y = -(lambda * ln_y).exp_m1();
        let lambda_star = 1.0 / lambda + yl * ln_y / om_y - g * a / sigma;
        let w3 = 1.0 / (lambda * lambda) - ty.dll + gp * a * a / s2 + g / sigma * (ty.dll - tm.dll);
        let w5 = -(g * tm.dtl / sigma + mu_star * a * gp / sigma);
        let w6 = -a * (g + z * gp) / s2;
        (a, lambda_star, w3, w5, w6)
    };
    Ok(ObsTerms {
        ll,
        mu,
        sigma,
        z,
        g,
        gp,
        t1,
        t2,
        mu_star,
        sigma_star,
        lambda_star,
        a,
        w1,
        w2,
        w3,
        w4,
        w5,
        w6,
    })
}

fn check_theta(model: &ModelSpec, theta: &Theta, y: &[f64]) -> Result<()> {
    if theta.beta.len() != model.p() || theta.tau.len() != model.q() {
        return Err(PlregError::Design("parameter dimensions do not match the model".into()));
    }
    if y.len() != model.n() {
        return Err(PlregError::Design("response length does not match the model".into()));
    }
    if !(theta.lambda >= 0.0 && theta.lambda.is_finite()) {
        return Err(PlregError::param("lambda", theta.lambda, "lambda >= 0"));
    }
    Ok(())
}

/// Full log-likelihood `Σ log f(yᵢ)`, including the `-Σ log yᵢ` term.
pub fn loglik(theta: &Theta, model: &ModelSpec, y: &[f64]) -> Result<f64> {
    check_theta(model, theta, y)?;
    let mut total = 0.0;
    for i in 0..model.n() {
        total += obs_terms(model, theta, y, i, false)?.ll;
    }
    Ok(total)
}

/// Per-observation log-density contributions `log f(yᵢ)`.
pub fn loglik_contributions(theta: &Theta, model: &ModelSpec, y: &[f64]) -> Result<Vec<f64>> {
    check_theta(model, theta, y)?;
    (0..model.n())
        .map(|i| obs_terms(model, theta, y, i, false).map(|o| o.ll))
        .collect()
}

/// Score vector and the per-observation weights.
pub fn score(theta: &Theta, model: &ModelSpec, y: &[f64]) -> Result<ScoreAndWeights> {
    check_theta(model, theta, y)?;
    let n = model.n();
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        terms.push(obs_terms(model, theta, y, i, true)?);
    }
    let col = |f: &dyn Fn(&ObsTerms) -> f64| DVector::from_iterator(n, terms.iter().map(f));
    let w = col(&|o| o.g);
    let t1 = col(&|o| o.t1);
    let t2 = col(&|o| o.t2);
    let mu_star = col(&|o| o.mu_star);
    let sigma_star = col(&|o| o.sigma_star);
    let lambda_star = col(&|o| o.lambda_star);
    let u_beta = model.x().transpose() * w.component_mul(&t1).component_mul(&mu_star);
    let u_tau = model.s().transpose() * t2.component_mul(&sigma_star);
    let u_lambda = if theta.lambda == 0.0 { f64::NAN } else { lambda_star.sum() };
    Ok(ScoreAndWeights {
        u_beta,
        u_tau,
        u_lambda,
        mu: col(&|o| o.mu),
        sigma: col(&|o| o.sigma),
        z: col(&|o| o.z),
        mu_star,
        sigma_star,
        lambda_star,
        w,
        t1,
        t2,
        w1: col(&|o| o.w1),
        w2: col(&|o| o.w2),
        w3: col(&|o| o.w3),
        w4: col(&|o| o.w4),
        w5: col(&|o| o.w5),
        w6: col(&|o| o.w6),
        dzv: col(&|o| o.gp),
        a: col(&|o| o.a),
        loglik: terms.iter().map(|o| o.ll).sum(),
    })
}

impl ScoreAndWeights {
    /// Score stacked as `(U_β, U_τ[, U_λ])`.
    pub fn vector(&self, with_lambda: bool) -> DVector<f64> {
        let p = self.u_beta.len();
        let q = self.u_tau.len();
        DVector::from_fn(p + q + usize::from(with_lambda), |i, _| {
            if i < p {
                self.u_beta[i]
            } else if i < p + q {
                self.u_tau[i - p]
            } else {
                self.u_lambda
            }
        })
    }

    /// Observed information `J_n = -∂²ℓ/∂θ∂θᵀ` assembled from the weights.
    pub fn information(&self, model: &ModelSpec, with_lambda: bool) -> DMatrix<f64> {
        let (p, q) = (model.p(), model.q());
        let k = p + q + usize::from(with_lambda);
        let x = model.x();
        let s = model.s();
        let mut j = DMatrix::zeros(k, k);
        let scaled = |m: &DMatrix<f64>, d: &DVector<f64>| {
            let mut out = m.clone();
            for (i, mut row) in out.row_iter_mut().enumerate() {
                row *= d[i];
            }
            out
        };
        let jbb = x.transpose() * scaled(x, &self.w1.component_mul(&self.t1));
        let jtt = s.transpose() * scaled(s, &self.w2.component_mul(&self.t2));
        let jbt = x.transpose() * scaled(s, &self.w4.component_mul(&self.t1).component_mul(&self.t2));
        j.view_mut((0, 0), (p, p)).copy_from(&jbb);
        j.view_mut((p, p), (q, q)).copy_from(&jtt);
        j.view_mut((0, p), (p, q)).copy_from(&jbt);
        j.view_mut((p, 0), (q, p)).copy_from(&jbt.transpose());
        if with_lambda {
            let jbl = x.transpose() * self.w5.component_mul(&self.t1);
            let jtl = s.transpose() * self.w6.component_mul(&self.t2);
            let l = p + q;
            j[(l, l)] = self.w3.sum();
            for a in 0..p {
                j[(a, l)] = jbl[a];
                j[(l, a)] = jbl[a];
            }
            for b in 0..q {
                j[(p + b, l)] = jtl[b];
                j[(l, p + b)] = jtl[b];
            }
        }
        j
    }
}

/// Observed information at `θ`, including the λ row when `λ > 0`.
pub fn hessian(theta: &Theta, model: &ModelSpec, y: &[f64]) -> Result<DMatrix<f64>> {
    let sw = score(theta, model, y)?;
    Ok(sw.information(model, theta.lambda > 0.0))
}
