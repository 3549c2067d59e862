//! Generalized leverage `GL(θ) = L̇_θ J⁻¹ L̈_θy`.

use nalgebra::DMatrix;

use crate::error::{PlregError, Result};
use crate::regression::{score, FitResult};

/// `L̈_θy = ∂²ℓ/∂θ∂yᵀ`, with a λ row when λ is free.
fn cross_derivative(fit: &FitResult, y: &[f64]) -> Result<DMatrix<f64>> {
    let model = &fit.model;
    let sw = score(&fit.theta, model, y)?;
    let (n, p, q) = (model.n(), model.p(), model.q());
    let with_lambda = fit.lambda_free;
    let k = p + q + usize::from(with_lambda);
    let lambda = fit.lambda();
    let (x, s) = (model.x(), model.s());
    let mut m = DMatrix::zeros(k, n);
    for i in 0..n {
        let yi = y[i];
        let ln_y = yi.ln();
        let sigma = sw.sigma[i];
        let z = sw.z[i];
        let g = sw.w[i];
        let gp = sw.dzv[i];
        // y* = t'(y)/σ = ∂z/∂y
        let y_star = if lambda == 0.0 {
            -1.0 / (yi * ln_y * sigma)
        } else {
            lambda / (sigma * yi * -(lambda * ln_y).exp_m1())
        };
        let b = sw.t1[i] * sw.mu_star[i] * y_star * gp;
        for r in 0..p {
            m[(r, i)] = x[(i, r)] * b;
        }
        let t = sw.t2[i] * y_star * (g + z * gp) / sigma;
        for r in 0..q {
            m[(p + r, i)] = s[(i, r)] * t;
        }
        if with_lambda {
            let u = (lambda * ln_y).exp();
            let om = -(lambda * ln_y).exp_m1();
            let a = sw.a[i];
            m[(p + q, i)] = u * (1.0 + lambda * ln_y - u) / (yi * om * om)
                - gp * y_star * a / sigma
                - g * (om + lambda * u * ln_y) / (sigma * yi * om * om);
        }
    }
    Ok(m)
}

/// The full `n × n` matrix `∂μ̃ᵢ/∂yⱼ`.
pub fn generalized_leverage_matrix(fit: &FitResult, y: &[f64]) -> Result<DMatrix<f64>> {
    fit.model.check_response(y)?;
    let model = &fit.model;
    let sw = score(&fit.theta, model, y)?;
    let j = sw.information(model, fit.lambda_free);
    let l = cross_derivative(fit, y)?;
    let sol = j
        .lu()
        .solve(&l)
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or_else(|| PlregError::Singular("observed information is singular".into()))?;
    let (n, p) = (model.n(), model.p());
    let x = model.x();
    let t1x = DMatrix::from_fn(n, p, |i, c| sw.t1[i] * x[(i, c)]);
    Ok(t1x * sol.rows(0, p))
}

/// Diagonal `GLᵢᵢ` of the generalized leverage.
pub fn generalized_leverage(fit: &FitResult, y: &[f64]) -> Result<Vec<f64>> {
    let gl = generalized_leverage_matrix(fit, y)?;
    Ok((0..gl.nrows()).map(|i| gl[(i, i)]).collect())
}
