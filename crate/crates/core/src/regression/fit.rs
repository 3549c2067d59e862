//! Maximum likelihood and penalized maximum likelihood fitting.

use nalgebra::{DMatrix, DVector};

use crate::error::{PlregError, Result};
use crate::optim::{bfgs, golden_section, newton, BfgsOptions};
use crate::regression::likelihood::{score, Theta};
use crate::regression::model::{Estimator, LambdaPolicy, ModelSpec};
use crate::regression::zeta::upsilon;

/// Tuning of the optimisers and of the λ profile.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// A fit is converged when `max |U| <` this.
    pub score_tol: f64,
    pub max_iter: usize,
    /// Lower end of the λ domain where an unpenalized fit drifting towards
    /// the log-log limit is pinned.
    pub lambda_min: f64,
    /// Upper end of the λ search domain.
    pub lambda_max: f64,
    /// Lower end of the λ profile grid.
    pub lambda_grid_min: f64,
    pub lambda_grid_points: usize,
    /// Relative tolerance of the golden-section refinement of λ.
    pub lambda_rel_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            score_tol: 1e-6,
            max_iter: 500,
            lambda_min: 1e-3,
            lambda_max: 50.0,
            lambda_grid_min: 0.02,
            lambda_grid_points: 40,
            lambda_rel_tol: 1e-6,
        }
    }
}

/// Goodness-of-fit measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitStats {
    pub aic: f64,
    pub pseudo_r2: f64,
    pub upsilon: f64,
}

/// The penalized profile of λ evaluated during a pMLE fit.
#[derive(Debug, Clone)]
pub struct LambdaProfile {
    pub lambdas: Vec<f64>,
    /// `None` where the observed λ-information was not positive or the
    /// constrained fit failed.
    pub penalized: Vec<Option<f64>>,
    /// Grid points excluded because the penalty was undefined.
    pub excluded: usize,
}

/// A fitted power logit regression.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// The model, with ζ set to the value used for the fit.
    pub model: ModelSpec,
    pub theta: Theta,
    pub loglik: f64,
    /// Observed information over the estimated parameters: `(β, τ, λ)`
    /// when λ is free, `(β, τ)` otherwise.
    pub observed_info: DMatrix<f64>,
    /// Inverse observed information; `None` when it is not positive definite.
    pub covariance: Option<DMatrix<f64>>,
    pub std_errors: Option<DVector<f64>>,
    pub converged: bool,
    pub iterations: usize,
    /// Estimator actually used (`Mle` whenever λ is not free).
    pub estimator: Estimator,
    pub lambda_free: bool,
    /// λ pinned at an end of its search domain.
    pub lambda_at_bound: bool,
    pub stats: FitStats,
    pub max_abs_score: f64,
    pub profile: Option<LambdaProfile>,
    /// `(ζ, Υ_ζ)` for every grid value when ζ was selected automatically.
    pub zeta_table: Vec<(f64, Option<f64>)>,
    pub mu: DVector<f64>,
    pub sigma: DVector<f64>,
    pub z: DVector<f64>,
}

impl FitResult {
    pub fn beta(&self) -> &DVector<f64> {
        &self.theta.beta
    }
    pub fn tau(&self) -> &DVector<f64> {
        &self.theta.tau
    }
    pub fn lambda(&self) -> f64 {
        self.theta.lambda
    }
    pub fn zeta(&self) -> Option<f64> {
        self.model.generator.zeta()
    }
    pub fn n_params(&self) -> usize {
        self.observed_info.nrows()
    }
    /// Estimates stacked as `(β, τ[, λ])`, matching `observed_info`.
    pub fn estimates(&self) -> DVector<f64> {
        self.theta.to_vector(self.lambda_free)
    }
    /// Parameter labels matching [`estimates`](Self::estimates).
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.model.median_names.iter().map(|n| format!("beta[{n}]")).collect();
        names.extend(self.model.dispersion_names.iter().map(|n| format!("tau[{n}]")));
        if self.lambda_free {
            names.push("lambda".into());
        }
        names
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Starting values: `β⁰` by least squares of `d₁(yᵢ)` on `X`,
/// `τ⁰ = (d₂(sd(logit y)), 0, …, 0)` and `λ⁰ = 1` (or the fixed λ).
pub fn initial_values(model: &ModelSpec, y: &[f64]) -> Result<Theta> {
    model.check_response(y)?;
    let n = model.n();
    let x = model.x();
    let target = DVector::from_iterator(n, y.iter().map(|&v| model.median_link.apply_unchecked(v)));
    let xtx = x.transpose() * x;
    let chol = xtx
        .cholesky()
        .ok_or_else(|| PlregError::Design("XᵀX is singular".into()))?;
    let beta = chol.solve(&(x.transpose() * target));
    let logits: Vec<f64> = y.iter().map(|&v| (v / (1.0 - v)).ln()).collect();
    let mean = logits.iter().sum::<f64>() / n as f64;
    let var = logits.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sd = var.sqrt().max(1e-3);
    let mut tau = DVector::zeros(model.q());
    tau[0] = model.dispersion_link.apply(sd)?;
    let lambda = model.lambda_policy.fixed_value().unwrap_or(1.0);
    Ok(Theta::new(beta, tau, lambda))
}

/// Outcome of maximising the likelihood over the free coordinates.
struct Maximum {
    theta: Theta,
    loglik: f64,
    max_abs_score: f64,
    iterations: usize,
    converged: bool,
}

/// Maximises the likelihood from `start`, with λ free or held at
/// `start.lambda`. BFGS (in `log λ` when λ is free) seeded with the inverse
/// observed information, followed by Newton polishing with the analytic
/// observed information.
fn maximize(model: &ModelSpec, y: &[f64], start: &Theta, free_lambda: bool, opts: &FitOptions) -> Result<Maximum> {
    let (p, q) = (model.p(), model.q());
    let fixed_lambda = start.lambda;
    let lambda_max = opts.lambda_max;
    let to_theta = |phi: &DVector<f64>| -> Option<Theta> {
        let mut th = Theta::from_vector(phi, p, q, fixed_lambda);
        if free_lambda {
            let lam = phi[p + q].exp();
            if !(lam > 1e-8 && lam <= lambda_max) {
                return None;
            }
            th.lambda = lam;
        }
        Some(th)
    };
    // objective in φ = (β, τ[, log λ]): value -ℓ and gradient -U
    let objective = |phi: &DVector<f64>| {
        let th = to_theta(phi)?;
        let sw = score(&th, model, y).ok()?;
        let mut g = -sw.vector(free_lambda);
        if free_lambda {
            g[p + q] *= th.lambda;
        }
        Some((-sw.loglik, g))
    };

    let mut phi0 = start.to_vector(free_lambda);
    if free_lambda {
        phi0[p + q] = start.lambda.ln();
    }
    let first = score(start, model, y)?;
    let h0 = {
        let mut info = first.information(model, free_lambda);
        if free_lambda {
            // information in log λ: λ² J_λλ - λ U_λ, cross terms × λ
            let l = p + q;
            let lam = start.lambda;
            for a in 0..l {
                info[(a, l)] *= lam;
                info[(l, a)] *= lam;
            }
            info[(l, l)] = lam * lam * info[(l, l)] - lam * first.u_lambda;
        }
        info.cholesky().map(|c| c.inverse())
    };
    let bfgs_opts = BfgsOptions {
        max_iter: opts.max_iter,
        grad_tol: opts.score_tol * 1e-2,
        f_rel_tol: 1e-15,
    };
    let quasi = bfgs(objective, phi0, h0, bfgs_opts)
        .ok_or_else(|| PlregError::Domain("initial values lie outside the parameter space".into()))?;
    let mut theta = to_theta(&quasi.x).expect("feasible BFGS iterate");
    let mut iterations = quasi.iterations;

    // Newton polish in (β, τ[, λ])
    let newton_obj = |v: &DVector<f64>| {
        let th = Theta::from_vector(v, p, q, fixed_lambda);
        if free_lambda && !(th.lambda > 1e-8 && th.lambda <= lambda_max) {
            return None;
        }
        let sw = score(&th, model, y).ok()?;
        let info = sw.information(model, free_lambda);
        Some((-sw.loglik, -sw.vector(free_lambda), info))
    };
    if let Some(polished) = newton(newton_obj, theta.to_vector(free_lambda), opts.score_tol * 1e-3, 50) {
        iterations += polished.iterations;
        if polished.f <= quasi.f + 1e-9 * quasi.f.abs().max(1.0) {
            theta = Theta::from_vector(&polished.x, p, q, fixed_lambda);
        }
    }
    let sw = score(&theta, model, y)?;
    let max_abs_score = max_abs(&sw.vector(free_lambda));
    Ok(Maximum {
        theta,
        loglik: sw.loglik,
        max_abs_score,
        iterations,
        converged: max_abs_score < opts.score_tol,
    })
}

pub(crate) fn pseudo_r2(model: &ModelSpec, y: &[f64], mu: &DVector<f64>) -> f64 {
    let a: Vec<f64> = mu.iter().map(|&m| model.median_link.apply_unchecked(m)).collect();
    let b: Vec<f64> = y.iter().map(|&v| model.median_link.apply_unchecked(v)).collect();
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, w) in a.iter().zip(&b) {
        sab += (x - ma) * (w - mb);
        saa += (x - ma).powi(2);
        sbb += (w - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab * sab / (saa * sbb)).clamp(0.0, 1.0)
}

/// Assembles the reported fit at `theta`.
#[allow(clippy::too_many_arguments)]
fn finish(
    model: &ModelSpec,
    y: &[f64],
    theta: Theta,
    lambda_free: bool,
    estimator: Estimator,
    converged: bool,
    iterations: usize,
    lambda_at_bound: bool,
    profile: Option<LambdaProfile>,
) -> Result<FitResult> {
    let sw = score(&theta, model, y)?;
    let observed_info = sw.information(model, lambda_free);
    let covariance = observed_info.clone().cholesky().map(|c| c.inverse());
    let std_errors = covariance
        .as_ref()
        .map(|c| DVector::from_iterator(c.nrows(), (0..c.nrows()).map(|i| c[(i, i)].sqrt())));
    // the pMLE λ is not a stationary point of ℓ, so only (β, τ) enter the check
    let score_vec = sw.vector(lambda_free && estimator == Estimator::Mle);
    let max_abs_score = max_abs(&score_vec);
    let k = model.p() + model.q() + usize::from(lambda_free);
    let stats = FitStats {
        aic: -2.0 * sw.loglik + 2.0 * k as f64,
        pseudo_r2: pseudo_r2(model, y, &sw.mu),
        upsilon: upsilon(sw.z.as_slice(), &model.generator),
    };
    Ok(FitResult {
        model: model.clone(),
        theta,
        loglik: sw.loglik,
        observed_info,
        covariance,
        std_errors,
        converged,
        iterations,
        estimator,
        lambda_free,
        lambda_at_bound,
        stats,
        max_abs_score,
        profile,
        zeta_table: Vec::new(),
        mu: sw.mu,
        sigma: sw.sigma,
        z: sw.z,
    })
}

/// Unpenalized maximum likelihood under the model's λ policy.
pub fn fit_mle(model: &ModelSpec, y: &[f64], init: Option<&Theta>) -> Result<FitResult> {
    fit_mle_with(model, y, init, &FitOptions::default())
}

pub fn fit_mle_with(model: &ModelSpec, y: &[f64], init: Option<&Theta>, opts: &FitOptions) -> Result<FitResult> {
    model.check_response(y)?;
    let mut start = match init {
        Some(t) => t.clone(),
        None => initial_values(model, y)?,
    };
    let free = model.lambda_policy.is_free();
    if let Some(v) = model.lambda_policy.fixed_value() {
        start.lambda = v;
    } else if !(start.lambda > 1e-8 && start.lambda <= opts.lambda_max) {
        start.lambda = 1.0;
    }
    let m = maximize(model, y, &start, free, opts)?;
    if m.converged {
        return finish(model, y, m.theta, free, Estimator::Mle, true, m.iterations, false, None);
    }
    let bound = if m.theta.lambda > 0.5 * opts.lambda_max {
        Some(opts.lambda_max)
    } else if m.theta.lambda < opts.lambda_min {
        Some(opts.lambda_min)
    } else {
        None
    };
    if let (true, Some(bound)) = (free, bound) {
        // the likelihood keeps rising towards an end of the domain: report
        // the fit at that end
        let mut pinned = m.theta.clone();
        pinned.lambda = bound;
        let b = maximize(model, y, &pinned, false, opts)?;
        if b.converged {
            return finish(model, y, b.theta, true, Estimator::Mle, true, m.iterations + b.iterations, true, None);
        }
    }
    Err(PlregError::Convergence {
        iterations: m.iterations,
        max_abs_score: m.max_abs_score,
        best: m.theta.to_vector(free).iter().cloned().collect(),
    })
}

/// Result of maximising over `(β, τ)` at one λ.
#[derive(Debug, Clone)]
pub struct ProfilePoint {
    pub lambda: f64,
    pub theta: Theta,
    /// `ℓ(β̂_λ, τ̂_λ, λ)`.
    pub loglik: f64,
    /// Observed λ-information `J*_λλ` at the constrained optimum.
    pub j_lambda_lambda: f64,
    /// `ℓ + ½ log(J*_λλ / n)`, `None` when `J*_λλ <= 0`.
    pub penalized: Option<f64>,
    pub converged: bool,
}

/// Penalized profile log-likelihood of λ, warm-started from `start`.
pub fn penalized_profile_loglik(
    lambda: f64,
    model: &ModelSpec,
    y: &[f64],
    start: Option<&Theta>,
) -> Result<ProfilePoint> {
    profile_point(lambda, model, y, start, &FitOptions::default())
}

fn profile_point(lambda: f64, model: &ModelSpec, y: &[f64], start: Option<&Theta>, opts: &FitOptions) -> Result<ProfilePoint> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(PlregError::param("lambda", lambda, "lambda > 0"));
    }
    let mut th = match start {
        Some(t) => t.clone(),
        None => initial_values(model, y)?,
    };
    th.lambda = lambda;
    let m = maximize(model, y, &th, false, opts)?;
    let sw = score(&m.theta, model, y)?;
    let j = sw.w3.sum();
    let n = model.n() as f64;
    let penalized = (j > 0.0).then(|| m.loglik + 0.5 * (j / n).ln());
    Ok(ProfilePoint {
        lambda,
        theta: m.theta,
        loglik: m.loglik,
        j_lambda_lambda: j,
        penalized,
        converged: m.converged,
    })
}

/// Two-step penalized maximum likelihood: λ̃ maximises the penalized
/// profile log-likelihood, then `(β̃, τ̃)` maximise ℓ at λ̃. With λ not
/// free this is [`fit_mle`].
pub fn fit_pmle(model: &ModelSpec, y: &[f64]) -> Result<FitResult> {
    fit_pmle_with(model, y, None, &FitOptions::default())
}

pub fn fit_pmle_with(model: &ModelSpec, y: &[f64], init: Option<&Theta>, opts: &FitOptions) -> Result<FitResult> {
    if !model.lambda_policy.is_free() {
        return fit_mle_with(model, y, init, opts);
    }
    model.check_response(y)?;
    let start = match init {
        Some(t) => t.clone(),
        None => initial_values(model, y)?,
    };
    let k = opts.lambda_grid_points.max(3);
    let (lo, hi) = (opts.lambda_grid_min.ln(), opts.lambda_max.ln());
    let grid: Vec<f64> = (0..k)
        .map(|i| (lo + (hi - lo) * i as f64 / (k - 1) as f64).exp())
        .collect();
    // sweep outwards from the grid point nearest the start, warm-starting each fit
    let center = grid
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.ln() - start.lambda.ln()).abs().total_cmp(&(b.1.ln() - start.lambda.ln()).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut points: Vec<Option<ProfilePoint>> = vec![None; k];
    let mut iterations = 0;
    let mut eval = |i: usize, from: &Theta, iterations: &mut usize| -> Option<Theta> {
        match profile_point(grid[i], model, y, Some(from), opts) {
            Ok(pt) => {
                *iterations += 1;
                let th = pt.theta.clone();
                let ok = pt.converged;
                points[i] = Some(pt);
                ok.then_some(th)
            }
            Err(_) => None,
        }
    };
    let center_theta = eval(center, &start, &mut iterations).unwrap_or_else(|| start.clone());
    let mut warm = center_theta.clone();
    for i in center + 1..k {
        if let Some(t) = eval(i, &warm, &mut iterations) {
            warm = t;
        }
    }
    let mut warm = center_theta;
    for i in (0..center).rev() {
        if let Some(t) = eval(i, &warm, &mut iterations) {
            warm = t;
        }
    }
    let penalized: Vec<Option<f64>> = points
        .iter()
        .map(|p| p.as_ref().filter(|p| p.converged).and_then(|p| p.penalized))
        .collect();
    let excluded = penalized.iter().filter(|p| p.is_none()).count();
    let best = penalized
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((i, v)),
        })
        .ok_or_else(|| PlregError::Singular("penalized profile undefined on the whole lambda grid".into()))?;
    let (bi, _) = best;
    let mut cache = points[bi].as_ref().expect("best grid point").clone();

    // golden section on log λ over the neighbouring grid cells
    let a = grid[bi.saturating_sub(1)].ln();
    let b = grid[(bi + 1).min(k - 1)].ln();
    let mut last_theta = cache.theta.clone();
    let evaluate_log = |t: f64, cache: &mut ProfilePoint, last: &mut Theta| -> f64 {
        match profile_point(t.exp(), model, y, Some(last), opts) {
            Ok(pt) if pt.converged => {
                *last = pt.theta.clone();
                let v = pt.penalized.unwrap_or(f64::NEG_INFINITY);
                if v > cache.penalized.unwrap_or(f64::NEG_INFINITY) {
                    *cache = pt;
                }
                -v
            }
            _ => f64::INFINITY,
        }
    };
    let (t_best, _) = golden_section(
        |t| evaluate_log(t, &mut cache, &mut last_theta),
        a,
        b,
        opts.lambda_rel_tol / (a.abs().max(b.abs()).max(1.0)),
    );
    // one parabolic step through t_best ± δ
    let delta = 1e-3;
    let f0 = evaluate_log(t_best, &mut cache, &mut last_theta);
    let fm = evaluate_log(t_best - delta, &mut cache, &mut last_theta);
    let fp = evaluate_log(t_best + delta, &mut cache, &mut last_theta);
    let curv = fp - 2.0 * f0 + fm;
    if curv > 0.0 && f0.is_finite() && fm.is_finite() && fp.is_finite() {
        let step = -0.5 * delta * (fp - fm) / curv;
        if step.abs() < delta && t_best + step >= a && t_best + step <= b {
            evaluate_log(t_best + step, &mut cache, &mut last_theta);
        }
    }
    let lambda_at_bound = (bi == k - 1 && cache.lambda >= opts.lambda_max * (1.0 - 1e-6))
        || (bi == 0 && cache.lambda <= opts.lambda_grid_min * (1.0 + 1e-6));
    let profile = LambdaProfile {
        lambdas: grid,
        penalized,
        excluded,
    };
    finish(
        model,
        y,
        cache.theta.clone(),
        true,
        Estimator::Pmle,
        cache.converged,
        iterations,
        lambda_at_bound,
        Some(profile),
    )
}

/// Fits the model according to its estimator and λ policy, selecting ζ when
/// the ζ policy asks for it.
pub fn fit(model: &ModelSpec, y: &[f64]) -> Result<FitResult> {
    fit_with(model, y, None, &FitOptions::default())
}

pub fn fit_with(model: &ModelSpec, y: &[f64], init: Option<&Theta>, opts: &FitOptions) -> Result<FitResult> {
    match &model.zeta_policy {
        crate::regression::model::ZetaPolicy::Auto(grid) => {
            let sel = crate::regression::zeta::select_zeta_with(model, y, grid, opts)?;
            Ok(sel.fit)
        }
        crate::regression::model::ZetaPolicy::Fixed => fit_fixed_zeta(model, y, init, opts),
    }
}

/// Fit with the generator's current ζ.
pub(crate) fn fit_fixed_zeta(model: &ModelSpec, y: &[f64], init: Option<&Theta>, opts: &FitOptions) -> Result<FitResult> {
    match (model.lambda_policy, model.estimator) {
        (LambdaPolicy::Free, Estimator::Pmle) => fit_pmle_with(model, y, init, opts),
        _ => fit_mle_with(model, y, init, opts),
    }
}

/// The fit report at given estimates, without optimising. Used to restore
/// saved fits; `converged` and `iterations` are taken as given.
pub fn fit_at(
    model: &ModelSpec,
    y: &[f64],
    theta: Theta,
    lambda_free: bool,
    estimator: Estimator,
    converged: bool,
    iterations: usize,
) -> Result<FitResult> {
    model.check_response(y)?;
    let o = FitOptions::default();
    let at_bound = lambda_free && (theta.lambda >= o.lambda_max * (1.0 - 1e-6) || theta.lambda <= o.lambda_min);
    finish(model, y, theta, lambda_free, estimator, converged, iterations, at_bound, None)
}
