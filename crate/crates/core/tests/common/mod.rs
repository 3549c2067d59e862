#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use plreg::diagnostics::PerturbationScheme;
use plreg::regression::{fit_with, loglik, loglik_contributions, Estimator, FitOptions, FitResult, ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use plreg::GeneratorSpec;
use rand::Rng;

/// One generator per family, with the ζ values used throughout the tests.
pub fn all_generators() -> Vec<GeneratorSpec> {
    vec![
        GeneratorSpec::normal(),
        GeneratorSpec::student_t(4.0).unwrap(),
        GeneratorSpec::logistic_i(),
        GeneratorSpec::logistic_ii(),
        GeneratorSpec::power_exponential(1.5).unwrap(),
        GeneratorSpec::slash(1.4).unwrap(),
        GeneratorSpec::hyperbolic(1.5).unwrap(),
        GeneratorSpec::sinh_normal(1.5).unwrap(),
    ]
}

pub struct Instance {
    pub model: ModelSpec,
    pub theta: Theta,
    pub y: Vec<f64>,
}

/// Two-covariate median and dispersion submodels with `U(0, 1)`
/// covariates, response drawn at `theta`.
pub fn instance(seed: u64, n: usize, generator: GeneratorSpec, lambda: f64) -> Instance {
    let mut rng = replicate_rng(seed, 0);
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let s = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let model = ModelSpec::new(x, s).unwrap().with_generator(generator);
    let theta = Theta::new(DVector::from_vec(vec![0.4, -1.1]), DVector::from_vec(vec![-1.3, 0.6]), lambda);
    let y = simulate_response(&model, &theta, &mut replicate_rng(seed, 1)).unwrap();
    Instance { model, theta, y }
}

/// Central difference of `f` along each coordinate.
pub fn fd_gradient<F: Fn(&DVector<f64>) -> f64>(f: F, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |k, _| {
        let mut up = x.clone();
        let mut dn = x.clone();
        up[k] += h;
        dn[k] -= h;
        (f(&up) - f(&dn)) / (2.0 * h)
    })
}

/// Central difference of a vector-valued `f`; column `k` is `∂f/∂x_k`.
pub fn fd_jacobian<F: Fn(&DVector<f64>) -> DVector<f64>>(f: F, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    for k in 0..x.len() {
        let mut up = x.clone();
        let mut dn = x.clone();
        up[k] += h;
        dn[k] -= h;
        let d = (f(&up) - f(&dn)) / (2.0 * h);
        jac.set_column(k, &d);
    }
    jac
}

/// `max |a - b| / max(max |b|, 1)`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

pub fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Same model with row `i` of the designs shifted.
pub fn shifted(model: &ModelSpec, i: usize, dx: Option<(usize, f64)>, ds: Option<(usize, f64)>) -> ModelSpec {
    let mut x = model.x().clone();
    let mut s = model.s().clone();
    if let Some((j, d)) = dx {
        x[(i, j)] += d;
    }
    if let Some((k, d)) = ds {
        s[(i, k)] += d;
    }
    ModelSpec::new(x, s).unwrap().with_generator(model.generator)
}

/// `∂²ℓ(θ|ω)/∂θ∂ωᵢ` by a mixed central difference of the perturbed
/// log-likelihood.
pub fn delta_by_differences(inst: &Instance, scheme: PerturbationScheme) -> DMatrix<f64> {
    let model = &inst.model;
    let (n, p, q) = (model.n(), model.p(), model.q());
    let theta0 = inst.theta.to_vector(false);
    let lambda = inst.theta.lambda;
    let col_sd = |m: &DMatrix<f64>, j: usize| sample_sd(m.column(j).as_slice());
    let (ht, hw) = (1e-4, 1e-4);
    let mut out = DMatrix::zeros(p + q, n);
    for i in 0..n {
        let perturbed = |th: &DVector<f64>, w: f64| -> f64 {
            let theta = Theta::from_vector(th, p, q, lambda);
            match scheme {
                PerturbationScheme::CaseWeights => {
                    let c = loglik_contributions(&theta, model, &inst.y).unwrap();
                    c.iter().enumerate().map(|(k, v)| if k == i { (1.0 + w) * v } else { *v }).sum()
                }
                PerturbationScheme::MedianCovariate(j) => {
                    let m = shifted(model, i, Some((j, w * col_sd(model.x(), j))), None);
                    loglik(&theta, &m, &inst.y).unwrap()
                }
                PerturbationScheme::DispersionCovariate(k) => {
                    let m = shifted(model, i, None, Some((k, w * col_sd(model.s(), k))));
                    loglik(&theta, &m, &inst.y).unwrap()
                }
                PerturbationScheme::Simultaneous(j, k) => {
                    let m = shifted(
                        model,
                        i,
                        Some((j, w * col_sd(model.x(), j))),
                        Some((k, w * col_sd(model.s(), k))),
                    );
                    loglik(&theta, &m, &inst.y).unwrap()
                }
            }
        };
        for r in 0..p + q {
            let mut up = theta0.clone();
            let mut dn = theta0.clone();
            up[r] += ht;
            dn[r] -= ht;
            let v = perturbed(&up, hw) - perturbed(&up, -hw) - perturbed(&dn, hw) + perturbed(&dn, -hw);
            out[(r, i)] = v / (4.0 * ht * hw);
        }
    }
    out
}

/// `∂μ̂ᵢ/∂yⱼ` by refitting at `yⱼ ± h`.
pub fn leverage_by_refitting(fit: &FitResult, y: &[f64], h: f64) -> DMatrix<f64> {
    let n = y.len();
    let opts = FitOptions {
        score_tol: 1e-11,
        ..FitOptions::default()
    };
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut up = y.to_vec();
        let mut dn = y.to_vec();
        up[j] += h;
        dn[j] -= h;
        let fu = fit_with(&fit.model, &up, Some(&fit.theta), &opts).unwrap();
        let fd = fit_with(&fit.model, &dn, Some(&fit.theta), &opts).unwrap();
        for i in 0..n {
            out[(i, j)] = (fu.mu[i] - fd.mu[i]) / (2.0 * h);
        }
    }
    out
}

/// A PL-N instance whose unpenalized fit converges with λ free.
pub fn converged_normal_fit(n: usize) -> (FitResult, Vec<f64>) {
    for seed in 40..80 {
        let inst = instance(seed, n, GeneratorSpec::normal(), 1.0);
        let opts = FitOptions {
            score_tol: 1e-11,
            ..FitOptions::default()
        };
        let model = inst.model.clone().with_estimator(Estimator::Mle);
        if let Ok(fit) = fit_with(&model, &inst.y, None, &opts) {
            if fit.converged && !fit.lambda_at_bound {
                return (fit, inst.y);
            }
        }
    }
    panic!("no converged instance");
}

