mod common;

use common::{all_generators, converged_normal_fit, delta_by_differences, instance, leverage_by_refitting, Instance};
use nalgebra::DVector;
use plreg::diagnostics::*;
use plreg::regression::{
    fit_at, fit_with, Estimator, FitOptions, FitResult, LambdaPolicy, ModelSpec,
};
use plreg::{GeneratorSpec, PlregError};

fn fitted(inst: &Instance, lambda: LambdaPolicy) -> FitResult {
    let model = inst.model.clone().with_lambda(lambda).with_estimator(Estimator::Mle);
    fit_with(&model, &inst.y, None, &FitOptions::default()).unwrap()
}

/// The fit report at the instance's true parameters.
fn at_truth(inst: &Instance) -> FitResult {
    fit_at(&inst.model, &inst.y, inst.theta.clone(), true, Estimator::Mle, true, 0).unwrap()
}

const SCHEMES: [PerturbationScheme; 4] = [
    PerturbationScheme::CaseWeights,
    PerturbationScheme::MedianCovariate(1),
    PerturbationScheme::DispersionCovariate(1),
    PerturbationScheme::Simultaneous(1, 1),
];

#[test]
fn delta_matches_perturbed_likelihood_differences() {
    for (g, generator) in all_generators().into_iter().enumerate() {
        let inst = instance(500 + g as u64, 15, generator, 1.3);
        let fit = at_truth(&inst);
        for scheme in SCHEMES {
            let analytic = delta_matrix(&fit, &inst.y, scheme).unwrap();
            let numeric = delta_by_differences(&inst, scheme);
            let e = common::rel_err(analytic.as_slice(), numeric.as_slice());
            assert!(e < 1e-4, "{} {}: relative error {e:e}", generator.label(), scheme.name());
        }
    }
}

#[test]
fn normal_quantile_and_deviance_residuals_are_z() {
    let inst = instance(11, 40, GeneratorSpec::normal(), 1.0);
    let fit = fitted(&inst, LambdaPolicy::Free);
    let z = fitted_z(&fit, &inst.y).unwrap();
    assert_eq!(quantile_residual(&fit, &inst.y).unwrap().values, z);
    assert_eq!(deviance_residual(&fit, &inst.y).unwrap().values, z);
}

#[test]
fn residuals_vanish_at_the_median() {
    for generator in all_generators() {
        let mut inst = instance(12, 30, generator, 0.8);
        let eta = inst.model.x() * &inst.theta.beta;
        let mu0 = 1.0 / (1.0 + (-eta[0]).exp());
        inst.y[0] = mu0;
        let fit = at_truth(&inst);
        for kind in [ResidualKind::Quantile, ResidualKind::Deviance, ResidualKind::Standardized] {
            let r = residuals(&fit, &inst.y, kind).unwrap();
            assert!(r.values[0].abs() < 1e-12, "{} {}", generator.label(), kind.name());
        }
    }
}

#[test]
fn hat_matrix_trace_is_p() {
    for (g, generator) in all_generators().into_iter().enumerate() {
        let inst = instance(20 + g as u64, 30, generator, 1.5);
        let h = hat_diag(&at_truth(&inst), &inst.y).unwrap();
        let trace: f64 = h.iter().sum();
        assert!((trace - 2.0).abs() < 1e-10);
        assert!(h.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}

#[test]
fn leverage_reduces_to_classical_for_gjs_normal() {
    let inst = instance(31, 30, GeneratorSpec::normal(), 1.0);
    let x = inst.model.x().clone();
    let model = ModelSpec::constant_dispersion(x.clone())
        .unwrap()
        .with_lambda(LambdaPolicy::Gjs)
        .with_estimator(Estimator::Mle);
    let fit = fit_with(&model, &inst.y, None, &FitOptions::default()).unwrap();
    let gl = generalized_leverage(&fit, &inst.y).unwrap();
    // ordinary hat matrix of the linear model for logit(y)
    let h = &x * (x.transpose() * &x).try_inverse().unwrap() * x.transpose();
    for i in 0..30 {
        let mu = fit.mu[i];
        let y = inst.y[i];
        let expected = h[(i, i)] * mu * (1.0 - mu) / (y * (1.0 - y));
        assert!((gl[i] - expected).abs() < 1e-8 * expected.abs().max(1.0), "case {i}");
    }
}

#[test]
fn leverage_matrix_matches_refits() {
    let (fit, y) = converged_normal_fit(20);
    let analytic = generalized_leverage_matrix(&fit, &y).unwrap();
    let numeric = leverage_by_refitting(&fit, &y, 1e-5);
    let e = (&analytic - &numeric).amax();
    assert!(e < 5e-3, "max abs difference {e:e}");
}

#[test]
fn local_influence_direction_is_normalised_and_deterministic() {
    let inst = instance(60, 30, all_generators()[1], 1.2);
    let fit = fitted(&inst, LambdaPolicy::Free);
    for scheme in SCHEMES {
        let a = local_influence(&fit, &inst.y, scheme).unwrap();
        let b = local_influence(&fit, &inst.y, scheme).unwrap();
        let norm: f64 = a.hmax.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_eq!(a.hmax, b.hmax);
        assert!(a.c.iter().all(|&c| c >= 0.0));
        let first = a.hmax.iter().find(|v| v.abs() > 1e-10).unwrap();
        assert!(*first > 0.0);
    }
}

#[test]
fn curvature_direction_matches_dense_eigenproblem() {
    let inst = instance(61, 25, GeneratorSpec::normal(), 1.0);
    let fit = fitted(&inst, LambdaPolicy::Free);
    let li = local_influence(&fit, &inst.y, PerturbationScheme::CaseWeights).unwrap();
    let delta = delta_matrix(&fit, &inst.y, PerturbationScheme::CaseWeights).unwrap();
    let j = plreg::regression::score(&fit.theta, &fit.model, &inst.y)
        .unwrap()
        .information(&fit.model, false);
    let b = delta.transpose() * j.try_inverse().unwrap() * &delta;
    let eig = nalgebra::SymmetricEigen::new((&b + b.transpose()) * 0.5);
    let k = eig.eigenvalues.iamax();
    let v = eig.eigenvectors.column(k);
    let h = DVector::from_vec(li.hmax.clone());
    assert!((h.dot(&v).abs() - 1.0).abs() < 1e-8);
    assert!((li.eigenvalue - eig.eigenvalues[k]).abs() < 1e-8 * eig.eigenvalues[k].abs());
    for i in 0..25 {
        assert!((li.c[i] - 2.0 * b[(i, i)].abs()).abs() < 1e-9 * li.c[i].max(1.0));
    }
}

#[test]
fn binary_covariate_cannot_be_perturbed() {
    let inst = instance(62, 30, GeneratorSpec::normal(), 1.0);
    let mut x = inst.model.x().clone();
    for i in 0..30 {
        x[(i, 1)] = (i % 2) as f64;
    }
    let model = ModelSpec::new(x, inst.model.s().clone())
        .unwrap()
        .with_names(vec!["(intercept)".into(), "group".into()], vec!["(intercept)".into(), "s1".into()])
        .unwrap();
    let fit = fit_at(&model, &inst.y, inst.theta.clone(), true, Estimator::Mle, true, 0).unwrap();
    let err = local_influence(&fit, &inst.y, PerturbationScheme::MedianCovariate(1)).unwrap_err();
    match err {
        PlregError::Usage(msg) => assert!(msg.contains("`group`"), "{msg}"),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn envelope_is_ordered_and_reproducible() {
    let inst = instance(70, 30, GeneratorSpec::normal(), 1.0);
    let fit = fitted(&inst, LambdaPolicy::Gjs);
    let a = simulated_envelope(&fit, &inst.y, ResidualKind::Quantile, 39, 5).unwrap();
    let b = simulated_envelope(&fit, &inst.y, ResidualKind::Quantile, 39, 5).unwrap();
    assert_eq!(a.lower, b.lower);
    assert_eq!(a.upper, b.upper);
    assert_eq!(a.lower.len(), 30);
    for r in 0..30 {
        assert!(a.lower[r] <= a.median[r] && a.median[r] <= a.upper[r]);
    }
    assert!(a.median.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(a.n_sim + a.failures, 39);
    let c = simulated_envelope(&fit, &inst.y, ResidualKind::Quantile, 39, 6).unwrap();
    assert_ne!(a.lower, c.lower);
}

#[test]
fn diagnose_collects_everything() {
    let inst = instance(71, 30, all_generators()[4], 1.0);
    let fit = fitted(&inst, LambdaPolicy::Free);
    let opts = DiagnosticsOptions {
        schemes: SCHEMES.to_vec(),
        envelope: Some((ResidualKind::Deviance, 19, 3)),
    };
    let report = diagnose(&fit, &inst.y, &opts).unwrap();
    assert_eq!(report.r_q.len(), 30);
    assert_eq!(report.influence.len(), 4);
    assert_eq!(report.gl_diag.len(), 30);
    assert!(report.envelope.is_some());
    assert!(report.fit_stats.pseudo_r2 >= 0.0 && report.fit_stats.pseudo_r2 <= 1.0);
}
