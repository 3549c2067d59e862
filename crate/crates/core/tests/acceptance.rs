//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! Criterion 8 reads the firm-cost data from the CSV named by
//! `PLREG_FIRMCOST_CSV` (columns `firmcost`, `indcost`, `sizelog`, any
//! case) and is skipped when the variable is unset.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use nalgebra::{DMatrix, DVector};
use plreg::cli::data::read_csv;
use plreg::diagnostics::*;
use plreg::quadrature::{integrate, QuadOptions};
use plreg::regression::*;
use plreg::simharness::*;
use plreg::{GeneratorSpec, PowerLogitParams};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn gradient_oracle() -> Outcome {
    let (mut worst_u, mut worst_j) = (0.0f64, 0.0f64);
    for (g, generator) in all_generators().into_iter().enumerate() {
        for rep in 0..3u64 {
            let inst = instance(10_000 + 10 * g as u64 + rep, 20, generator, [0.7, 1.0, 2.2][rep as usize]);
            let mut theta = inst.theta.clone();
            theta.beta[1] += 0.2;
            theta.tau[0] += 0.1;
            let (p, q) = (inst.model.p(), inst.model.q());
            let point = theta.to_vector(true);
            let unpack = |v: &DVector<f64>| Theta::new(v.rows(0, p).into(), v.rows(p, q).into(), v[p + q]);
            let u = score(&theta, &inst.model, &inst.y).unwrap().vector(true);
            let u_fd = fd_gradient(|v| loglik(&unpack(v), &inst.model, &inst.y).unwrap(), &point, 1e-6);
            worst_u = worst_u.max(rel_err(u.as_slice(), u_fd.as_slice()));
            let j = hessian(&theta, &inst.model, &inst.y).unwrap();
            let j_fd = -fd_jacobian(
                |v| score(&unpack(v), &inst.model, &inst.y).unwrap().vector(true),
                &point,
                1e-6,
            );
            worst_j = worst_j.max(rel_err(j.as_slice(), j_fd.as_slice()));
        }
    }
    verdict(
        worst_u < 1e-5 && worst_j < 1e-4,
        format!("max rel err score {worst_u:.1e} (tol 1e-5), Hessian {worst_j:.1e} (tol 1e-4)"),
    )
}

/// `∫ pdf` over the representable part of (0, 1), plus the cdf mass
/// outside it, through `y = 1 / (1 + e^{-s})`.
fn total_mass(p: &PowerLogitParams) -> f64 {
    let lo = p.quantile(1e-12).unwrap().max(1e-300);
    let hi = p.quantile(1.0 - 1e-12).unwrap().min(1.0 - 1e-10);
    let (a, b) = ((lo / (1.0 - lo)).ln(), (hi / (1.0 - hi)).ln());
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_intervals: 20_000,
    };
    let f = |s: f64| {
        let y = 1.0 / (1.0 + (-s).exp());
        let w = if s > 0.0 { (-s).exp() / (1.0 + (-s).exp()).powi(2) } else { s.exp() / (1.0 + s.exp()).powi(2) };
        p.pdf(y).unwrap() * w
    };
    let m = p.mu().ln() - (1.0 - p.mu()).ln();
    let inner = integrate(f, a, m, opts).value + integrate(f, m, b, opts).value;
    let y_lo = 1.0 / (1.0 + (-a).exp());
    let y_hi = 1.0 / (1.0 + (-b).exp());
    inner + p.cdf(y_lo).unwrap() + p.sf(y_hi).unwrap()
}

fn distribution_correctness() -> Outcome {
    let (mut worst_int, mut worst_rt) = (0.0f64, 0.0f64);
    for generator in all_generators() {
        for &mu in &[0.2, 0.5, 0.8] {
            for &sigma in &[0.3, 1.0, 2.0] {
                for &lambda in &[0.5, 1.0, 3.0] {
                    let p = PowerLogitParams::new(mu, sigma, lambda, generator).unwrap();
                    worst_int = worst_int.max((total_mass(&p) - 1.0).abs());
                    for &u in &[0.02, 0.1, 0.25, 0.5, 0.75, 0.9, 0.98] {
                        let y = p.quantile(u).unwrap();
                        worst_rt = worst_rt.max((p.cdf(y).unwrap() - u).abs());
                    }
                }
            }
        }
    }
    verdict(
        worst_int < 1e-6 && worst_rt < 1e-8,
        format!("max |mass - 1| {worst_int:.1e} (tol 1e-6), max |F(Q(u)) - u| {worst_rt:.1e} (tol 1e-8)"),
    )
}

fn property_suite() -> Outcome {
    let mut worst = 0.0f64;
    let ys: Vec<f64> = (1..40).map(|k| k as f64 / 40.0).collect();
    for generator in all_generators() {
        for &(mu, sigma, lambda) in &[(0.3, 0.6, 0.5), (0.5, 1.0, 1.0), (0.75, 1.8, 2.5)] {
            let p = PowerLogitParams::new(mu, sigma, lambda, generator).unwrap();
            let logit_pow = |v: f64| (v.powf(lambda) / (1.0 - v.powf(lambda))).ln();
            // median
            worst = worst.max((p.cdf(mu).unwrap() - 0.5).abs());
            for &y in &ys {
                let fy = p.cdf(y).unwrap();
                // cdf through the generator
                worst = worst.max((fy - generator.cdf((logit_pow(y) - logit_pow(mu)) / sigma)).abs());
                // Y^λ is GJS
                let gjs = PowerLogitParams::gjs(mu.powf(lambda), sigma, generator).unwrap();
                worst = worst.max((gjs.cdf(y.powf(lambda)).unwrap() - fy).abs());
                // power scaling
                let c = 1.7;
                let scaled = PowerLogitParams::new(mu.powf(c), sigma, lambda / c, generator).unwrap();
                worst = worst.max((scaled.cdf(y.powf(c)).unwrap() - fy).abs());
                // GJS reflection
                let g1 = PowerLogitParams::gjs(mu, sigma, generator).unwrap();
                let g2 = PowerLogitParams::gjs(1.0 - mu, sigma, generator).unwrap();
                worst = worst.max((1.0 - g1.cdf(1.0 - y).unwrap() - g2.cdf(y).unwrap()).abs());
            }
            for k in 1..20 {
                let u = k as f64 / 20.0;
                let zu = generator.quantile(u).unwrap();
                let e = (sigma * zu).exp();
                let closed = mu * (e / (1.0 - mu.powf(lambda) * (1.0 - e))).powf(1.0 / lambda);
                worst = worst.max((p.quantile(u).unwrap() - closed).abs());
            }
        }
    }
    let mut worst_limit = 0.0f64;
    for generator in all_generators() {
        let pl = PowerLogitParams::new(0.4, 0.8, 1e-4, generator).unwrap();
        let ll = PowerLogitParams::log_log(0.4, 0.8, generator).unwrap();
        for &y in &ys {
            worst_limit = worst_limit.max((pl.cdf(y).unwrap() - ll.cdf(y).unwrap()).abs());
        }
    }
    let inst = instance(10_500, 40, GeneratorSpec::normal(), 1.0);
    let fit = fit(&inst.model, &inst.y).unwrap();
    let z = fitted_z(&fit, &inst.y).unwrap();
    let coincide = quantile_residual(&fit, &inst.y).unwrap().values == z
        && deviance_residual(&fit, &inst.y).unwrap().values == z;
    verdict(
        worst < 1e-10 && worst_limit < 1e-3 && coincide,
        format!(
            "max equality err {worst:.1e} (tol 1e-10), log-log limit {worst_limit:.1e} (tol 1e-3), PL-N r_q = r_d = z: {coincide}"
        ),
    )
}

fn table_one() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for generator in [GeneratorSpec::student_t(5.0).unwrap(), GeneratorSpec::power_exponential(1.5).unwrap()] {
        for n in [40, 120] {
            let design = SimDesign::table_one(generator, n, 500, 2024);
            let report = run_design(&design).unwrap();
            let mle = report.cell(Estimator::Mle, "lambda").unwrap().bias;
            let pmle = report.cell(Estimator::Pmle, "lambda").unwrap().bias;
            let beta_bias = ["beta1", "beta2"]
                .iter()
                .flat_map(|b| [Estimator::Mle, Estimator::Pmle].map(|e| report.cell(e, b).unwrap().bias.abs()))
                .fold(0.0, f64::max);
            let lambda_ok = if n == 40 { pmle.abs() < mle.abs() } else { (0.1..=0.8).contains(&pmle) };
            ok &= lambda_ok && beta_bias < 0.05;
            lines.push(format!(
                "{}: lambda bias mle {mle:.3} pmle {pmle:.3}, max |beta bias| {beta_bias:.3}, used {}",
                design.name, report.used
            ));
        }
    }
    verdict(ok, lines.join("; "))
}

fn contamination() -> Outcome {
    let (mut robust, mut flagged) = (0, 0);
    let seeds = 50;
    for seed in 1..=seeds {
        let r = run_contamination(&ContaminationDesign::new(seed)).unwrap();
        if r.student_t.line_shift < r.normal.line_shift {
            robust += 1;
        }
        if r.normal.gl_ranking()[..2].contains(&40) {
            flagged += 1;
        }
    }
    let need = (0.8 * seeds as f64).ceil() as usize;
    verdict(
        robust >= need && flagged >= need,
        format!("PL-t(5) smaller line shift {robust}/{seeds}, case 40 in top-2 GL {flagged}/{seeds} (need {need})"),
    )
}

fn delta_oracle() -> Outcome {
    let schemes = [
        PerturbationScheme::CaseWeights,
        PerturbationScheme::MedianCovariate(1),
        PerturbationScheme::DispersionCovariate(1),
        PerturbationScheme::Simultaneous(1, 1),
    ];
    let mut worst = 0.0f64;
    for (g, generator) in all_generators().into_iter().enumerate() {
        let inst = instance(10_600 + g as u64, 15, generator, 1.3);
        let fit = fit_at(&inst.model, &inst.y, inst.theta.clone(), true, Estimator::Mle, true, 0).unwrap();
        for scheme in schemes {
            let analytic = delta_matrix(&fit, &inst.y, scheme).unwrap();
            let numeric = delta_by_differences(&inst, scheme);
            worst = worst.max(rel_err(analytic.as_slice(), numeric.as_slice()));
        }
    }
    verdict(worst < 1e-4, format!("max rel err {worst:.1e} over 8 generators x 4 schemes (tol 1e-4)"))
}

fn leverage_oracle() -> Outcome {
    let (fit, y) = converged_normal_fit(20);
    let analytic = generalized_leverage_matrix(&fit, &y).unwrap();
    let numeric: DMatrix<f64> = leverage_by_refitting(&fit, &y, 1e-5);
    let e = (&analytic - &numeric).amax();
    verdict(e < 5e-3, format!("max |GL - refit FD| {e:.1e} (tol 5e-3)"))
}

fn firm_cost() -> Outcome {
    let Some(path) = std::env::var_os("PLREG_FIRMCOST_CSV") else {
        return Outcome::Skip("PLREG_FIRMCOST_CSV not set".into());
    };
    let table = match read_csv(std::path::Path::new(&path)) {
        Ok(t) => t,
        Err(e) => return Outcome::Skip(format!("data unavailable: {e}")),
    };
    let col = |name: &str| -> Option<Vec<f64>> {
        let h = table.headers.iter().find(|h| h.eq_ignore_ascii_case(name))?;
        table.column(h).ok().map(<[f64]>::to_vec)
    };
    let (Some(mut y), Some(indcost), Some(sizelog)) = (col("firmcost"), col("indcost"), col("sizelog")) else {
        return Outcome::Fail("missing firmcost, indcost or sizelog".into());
    };
    // percentages are mapped to the unit interval
    if y.iter().any(|&v| v >= 1.0) {
        y.iter_mut().for_each(|v| *v /= 100.0);
    }
    let n = y.len();
    let x = DMatrix::from_fn(n, 3, |i, j| [1.0, indcost[i], sizelog[i]][j]);
    let s = DMatrix::from_fn(n, 3, |i, j| [1.0, indcost[i], sizelog[i]][j]);
    let constant = ModelSpec::constant_dispersion(x.clone())
        .unwrap()
        .with_generator(GeneratorSpec::slash(2.29).unwrap());
    let varying = ModelSpec::new(x, s).unwrap().with_generator(GeneratorSpec::slash(1.88).unwrap());
    let (fc, fv) = match (fit(&constant, &y), fit(&varying, &y)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::Fail(format!("fit failed: {e}")),
    };
    let est = [fc.beta()[0], fc.beta()[1], fc.beta()[2], fc.tau()[0], fc.lambda()];
    let target = [3.867, 2.133, -0.905, 0.133, 1.788];
    let worst = est.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let lr = 2.0 * (fv.loglik - fc.loglik);
    verdict(
        worst <= 0.02 && (lr - 1.4).abs() <= 0.1,
        format!("estimates {est:.3?}, max deviation {worst:.3} (tol 0.02), LR {lr:.2} (target 1.4 +- 0.1)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("gradient/Hessian oracle", gradient_oracle),
        ("distribution correctness", distribution_correctness),
        ("property suite", property_suite),
        ("bias study at desk scale", table_one),
        ("contamination experiment", contamination),
        ("Delta-matrix oracle", delta_oracle),
        ("generalized leverage oracle", leverage_oracle),
        ("firm-cost application", firm_cost),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {} {name}: {tag} ({secs:.1} s) {detail}", k + 1);
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
