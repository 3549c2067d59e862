//! Monte Carlo experiments: bias and √MSE of the mle and pmle over
//! replicated designs, and the outlier/leverage contamination experiment.
//!
//! Every replicate draws from its own ChaCha8 stream `(seed, index)`, so
//! reports do not depend on scheduling.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diagnostics::{generalized_leverage, quantile_residual, standardized_residual};
use crate::distribution::PowerLogitParams;
use crate::error::{PlregError, Result};
use crate::generators::{open_unit, GeneratorSpec};
use crate::links::{DispersionLink, MedianLink};
use crate::regression::{fit_with, Estimator, FitOptions, FitResult, LambdaPolicy, ModelSpec, Theta};

/// Stream reserved for the fixed covariates of a design.
const COVARIATE_STREAM: u64 = u64::MAX;

/// RNG for replicate `index` of the experiment seeded with `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws a response vector from the model at `theta`.
pub fn simulate_response(model: &ModelSpec, theta: &Theta, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let eta1 = model.x() * &theta.beta;
    let eta2 = model.s() * &theta.tau;
    (0..model.n())
        .map(|i| {
            let mu = model.median_link.inverse(eta1[i]);
            let sigma = model
                .dispersion_link
                .inverse(eta2[i])
                .ok_or_else(|| PlregError::Domain(format!("dispersion predictor {} is invalid", eta2[i])))?;
            let law = PowerLogitParams::new(mu, sigma, theta.lambda, model.generator)?;
            Ok(law.sample_with(rng, 1)[0])
        })
        .collect()
}

/// A replicated simulation design with `U(0, 1)` covariates held fixed
/// across replicates.
#[derive(Debug, Clone)]
pub struct SimDesign {
    pub name: String,
    pub generator: GeneratorSpec,
    /// Intercept first; one `U(0, 1)` covariate per further entry.
    pub beta: Vec<f64>,
    pub tau: Vec<f64>,
    pub lambda: f64,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub estimators: Vec<Estimator>,
    pub median_link: MedianLink,
    pub dispersion_link: DispersionLink,
}

impl SimDesign {
    /// The two-covariate design `logit μ = β₁ + β₂x`, `log σ = τ₁ + τ₂s`
    /// with `β = (0.5, 1.5)`, `τ = (-1, 0.5)`, `λ = 1`, both estimators.
    pub fn table_one(generator: GeneratorSpec, n: usize, replicates: usize, seed: u64) -> Self {
        Self {
            name: format!("PL-{} n={n}", generator.label()),
            generator,
            beta: vec![0.5, 1.5],
            tau: vec![-1.0, 0.5],
            lambda: 1.0,
            n,
            replicates,
            seed,
            estimators: vec![Estimator::Mle, Estimator::Pmle],
            median_link: MedianLink::Logit,
            dispersion_link: DispersionLink::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(PlregError::Usage("a design needs at least one replicate".into()));
        }
        if self.beta.is_empty() || self.tau.is_empty() {
            return Err(PlregError::Usage("beta and tau need an intercept".into()));
        }
        if self.estimators.is_empty() {
            return Err(PlregError::Usage("a design needs at least one estimator".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(PlregError::param("lambda", self.lambda, "lambda > 0"));
        }
        if self.beta.len() + self.tau.len() + 1 >= self.n {
            return Err(PlregError::Usage(format!("n = {} is too small for the design", self.n)));
        }
        Ok(())
    }

    /// The model with the design's fixed covariates.
    pub fn model(&self) -> Result<ModelSpec> {
        let mut rng = replicate_rng(self.seed, COVARIATE_STREAM);
        let (p, q) = (self.beta.len(), self.tau.len());
        let mut draw = |cols: usize| {
            let mut m = DMatrix::from_element(self.n, cols, 1.0);
            for j in 1..cols {
                for i in 0..self.n {
                    m[(i, j)] = open_unit(&mut rng);
                }
            }
            m
        };
        let x = draw(p);
        let s = draw(q);
        Ok(ModelSpec::new(x, s)?
            .with_median_link(self.median_link)
            .with_dispersion_link(self.dispersion_link)
            .with_generator(self.generator))
    }

    pub fn theta(&self) -> Theta {
        Theta::new(
            DVector::from_column_slice(&self.beta),
            DVector::from_column_slice(&self.tau),
            self.lambda,
        )
    }

    pub fn parameter_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.beta.len()).map(|j| format!("beta{j}")).collect();
        names.extend((1..=self.tau.len()).map(|j| format!("tau{j}")));
        names.push("lambda".into());
        names
    }
}

/// Bias and √MSE of one parameter under one estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCell {
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub rmse: f64,
}

impl MomentCell {
    fn from_estimates(truth: f64, values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let bias = mean - truth;
        // √MSE from the identity MSE = bias² + variance
        let rmse = (bias * bias + variance).sqrt();
        Self {
            truth,
            mean,
            bias,
            variance,
            rmse,
        }
    }
}

/// Results for one estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: Estimator,
    /// One cell per parameter, in [`SimDesign::parameter_names`] order.
    pub cells: Vec<MomentCell>,
    /// Replicates whose λ estimate sits at an end of its domain.
    pub at_bound: usize,
    /// Replicates where this estimator failed.
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct SimReport {
    pub design: SimDesign,
    pub parameter_names: Vec<String>,
    pub summaries: Vec<EstimatorSummary>,
    /// Replicates used for the moments (all estimators succeeded).
    pub used: usize,
    /// Replicates excluded because some estimator failed.
    pub failures: usize,
    pub wall_clock_secs: f64,
}

impl SimReport {
    pub fn summary(&self, estimator: Estimator) -> Option<&EstimatorSummary> {
        self.summaries.iter().find(|s| s.estimator == estimator)
    }

    /// Bias and √MSE of a named parameter.
    pub fn cell(&self, estimator: Estimator, parameter: &str) -> Option<MomentCell> {
        let k = self.parameter_names.iter().position(|n| n == parameter)?;
        self.summary(estimator).map(|s| s.cells[k])
    }
}

/// Per-replicate outcome: estimates (or failure) per estimator.
type Outcome = Vec<Option<(Vec<f64>, bool)>>;

fn fit_estimator(model: &ModelSpec, y: &[f64], estimator: Estimator, opts: &FitOptions) -> Option<(Vec<f64>, bool)> {
    let m = model.clone().with_lambda(LambdaPolicy::Free).with_estimator(estimator);
    let fit = fit_with(&m, y, None, opts).ok()?;
    if !fit.converged && !fit.lambda_at_bound {
        return None;
    }
    Some((fit.theta.to_vector(true).iter().cloned().collect(), fit.lambda_at_bound))
}

/// Runs every replicate of `design` with each estimator. Fails when no
/// replicate succeeds under every estimator.
pub fn run_design(design: &SimDesign) -> Result<SimReport> {
    run_design_with(design, &FitOptions::default())
}

pub fn run_design_with(design: &SimDesign, opts: &FitOptions) -> Result<SimReport> {
    design.validate()?;
    let start = Instant::now();
    let model = design.model()?;
    let theta = design.theta();
    let outcomes: Vec<Outcome> = (0..design.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(design.seed, r as u64);
            match simulate_response(&model, &theta, &mut rng) {
                Ok(y) => design
                    .estimators
                    .iter()
                    .map(|&e| fit_estimator(&model, &y, e, opts))
                    .collect(),
                Err(_) => vec![None; design.estimators.len()],
            }
        })
        .collect();
    let complete: Vec<&Outcome> = outcomes.iter().filter(|o| o.iter().all(Option::is_some)).collect();
    let used = complete.len();
    if used == 0 {
        return Err(PlregError::TooManyFailures {
            failed: design.replicates,
            total: design.replicates,
        });
    }
    let truth = theta.to_vector(true);
    let summaries = design
        .estimators
        .iter()
        .enumerate()
        .map(|(e, &estimator)| {
            let failures = outcomes.iter().filter(|o| o[e].is_none()).count();
            let at_bound = complete.iter().filter(|o| o[e].as_ref().is_some_and(|v| v.1)).count();
            let cells = (0..truth.len())
                .map(|k| {
                    let values: Vec<f64> = complete.iter().map(|o| o[e].as_ref().expect("complete").0[k]).collect();
                    MomentCell::from_estimates(truth[k], &values)
                })
                .collect();
            EstimatorSummary {
                estimator,
                cells,
                at_bound,
                failures,
            }
        })
        .collect();
    Ok(SimReport {
        parameter_names: design.parameter_names(),
        design: design.clone(),
        summaries,
        used,
        failures: design.replicates - used,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// The contamination experiment: a PL-N sample with constant dispersion,
/// `logit μᵢ = 3.5 - 3.5xᵢ`, `log σ = -1.5`, `λ = 0.5`, `n = 40`,
/// `x₃₉ = 0.8`, `x₄₀ = 1.2`; `y₃₉` and `y₄₀` are replaced by 0.9 and
/// `max yᵢ`.
#[derive(Debug, Clone, Copy)]
pub struct ContaminationDesign {
    pub seed: u64,
    pub estimator: Estimator,
}

impl ContaminationDesign {
    pub const N: usize = 40;
    pub const BETA: [f64; 2] = [3.5, -3.5];
    pub const LOG_SIGMA: f64 = -1.5;
    pub const LAMBDA: f64 = 0.5;

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            estimator: Estimator::Pmle,
        }
    }

    /// Covariate column of the design.
    pub fn covariate(&self) -> Vec<f64> {
        let mut rng = replicate_rng(self.seed, COVARIATE_STREAM);
        let mut x: Vec<f64> = (0..Self::N - 2).map(|_| open_unit(&mut rng)).collect();
        x.push(0.8);
        x.push(1.2);
        x
    }

    /// `(x, clean y, contaminated y)`.
    pub fn data(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let x = self.covariate();
        let model = self.model(GeneratorSpec::normal(), &x)?;
        let theta = Theta::new(
            DVector::from_column_slice(&Self::BETA),
            DVector::from_element(1, Self::LOG_SIGMA),
            Self::LAMBDA,
        );
        let mut rng = replicate_rng(self.seed, 0);
        let clean = simulate_response(&model, &theta, &mut rng)?;
        let mut dirty = clean.clone();
        let max = clean.iter().cloned().fold(f64::MIN, f64::max);
        dirty[Self::N - 2] = 0.9;
        dirty[Self::N - 1] = max;
        Ok((x, clean, dirty))
    }

    fn model(&self, generator: GeneratorSpec, x: &[f64]) -> Result<ModelSpec> {
        let xm = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] });
        Ok(ModelSpec::constant_dispersion(xm)?
            .with_generator(generator)
            .with_estimator(self.estimator))
    }
}

/// One model fitted to the clean and the contaminated sample.
#[derive(Debug, Clone)]
pub struct ContaminationFit {
    pub label: String,
    pub clean: FitResult,
    pub contaminated: FitResult,
    /// `‖β̃_contaminated - β̃_clean‖₂`.
    pub coefficient_shift: f64,
    /// Mean absolute change of the fitted median curve over `x ∈ [0, 1.2]`.
    pub line_shift: f64,
    /// Diagnostics on the contaminated fit.
    pub r_q: Vec<f64>,
    pub r_p: Vec<f64>,
    pub gl_diag: Vec<f64>,
}

impl ContaminationFit {
    /// 1-based case numbers ordered by decreasing `GLᵢᵢ`.
    pub fn gl_ranking(&self) -> Vec<usize> {
        rank_desc(&self.gl_diag)
    }
    /// 1-based case numbers ordered by decreasing `|rᵢ^p|`.
    pub fn standardized_ranking(&self) -> Vec<usize> {
        let a: Vec<f64> = self.r_p.iter().map(|v| if v.is_nan() { f64::INFINITY } else { v.abs() }).collect();
        rank_desc(&a)
    }
}

fn rank_desc(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    idx.into_iter().map(|i| i + 1).collect()
}

#[derive(Debug, Clone)]
pub struct ContaminationReport {
    pub seed: u64,
    pub x: Vec<f64>,
    pub y_clean: Vec<f64>,
    pub y_contaminated: Vec<f64>,
    pub normal: ContaminationFit,
    pub student_t: ContaminationFit,
}

fn fitted_line(fit: &FitResult, grid: &[f64]) -> Vec<f64> {
    let b = fit.beta();
    grid.iter()
        .map(|&x| fit.model.median_link.inverse(b[0] + b[1] * x))
        .collect()
}

fn contamination_fit(design: &ContaminationDesign, generator: GeneratorSpec, x: &[f64], clean: &[f64], dirty: &[f64]) -> Result<ContaminationFit> {
    let model = design.model(generator, x)?;
    let opts = FitOptions::default();
    let fc = fit_with(&model, clean, None, &opts)?;
    let fd = fit_with(&model, dirty, None, &opts)?;
    let grid: Vec<f64> = (0..=120).map(|k| k as f64 / 100.0).collect();
    let (lc, ld) = (fitted_line(&fc, &grid), fitted_line(&fd, &grid));
    let line_shift = lc.iter().zip(&ld).map(|(a, b)| (a - b).abs()).sum::<f64>() / grid.len() as f64;
    let coefficient_shift = (fd.beta() - fc.beta()).norm();
    let r_q = quantile_residual(&fd, dirty)?.values;
    let r_p = standardized_residual(&fd, dirty)?.0.values;
    let gl_diag = generalized_leverage(&fd, dirty)?;
    Ok(ContaminationFit {
        label: model.label(),
        clean: fc,
        contaminated: fd,
        coefficient_shift,
        line_shift,
        r_q,
        r_p,
        gl_diag,
    })
}

/// Fits PL-N and PL-t(5) to the clean and contaminated samples.
pub fn run_contamination(design: &ContaminationDesign) -> Result<ContaminationReport> {
    let (x, clean, dirty) = design.data()?;
    let normal = contamination_fit(design, GeneratorSpec::normal(), &x, &clean, &dirty)?;
    let student_t = contamination_fit(design, GeneratorSpec::student_t(5.0)?, &x, &clean, &dirty)?;
    Ok(ContaminationReport {
        seed: design.seed,
        x,
        y_clean: clean,
        y_contaminated: dirty,
        normal,
        student_t,
    })
}
