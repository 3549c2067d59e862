mod common;

use common::{all_generators, instance};
use plreg::regression::*;
use plreg::GeneratorSpec;

#[test]
fn fits_recover_parameters_on_large_samples() {
    let inst = instance(1, 2000, all_generators()[1], 1.5);
    let fit = fit(&inst.model, &inst.y).unwrap();
    assert!(fit.converged);
    let truth = inst.theta.to_vector(true);
    let est = fit.estimates();
    let se = fit.std_errors.clone().unwrap();
    for k in 0..truth.len() {
        assert!((est[k] - truth[k]).abs() < 4.0 * se[k], "parameter {k}: {} vs {}", est[k], truth[k]);
    }
    assert!(fit.max_abs_score < 1e-4);
}

#[test]
fn estimators_agree_when_lambda_is_fixed() {
    let inst = instance(2, 60, all_generators()[4], 1.0);
    for policy in [LambdaPolicy::Gjs, LambdaPolicy::Fixed(2.0), LambdaPolicy::LogLog] {
        let m = inst.model.clone().with_lambda(policy);
        let a = fit(&m.clone().with_estimator(Estimator::Mle), &inst.y).unwrap();
        let b = fit(&m.with_estimator(Estimator::Pmle), &inst.y).unwrap();
        assert!((&a.estimates() - &b.estimates()).amax() < 1e-8, "{}", policy.describe());
        assert_eq!(a.n_params(), 4);
    }
}

#[test]
fn gjs_model_is_labelled_and_keeps_lambda() {
    let inst = instance(3, 50, GeneratorSpec::normal(), 1.0);
    let f = fit(&inst.model.clone().with_lambda(LambdaPolicy::Gjs), &inst.y).unwrap();
    assert_eq!(f.model.label(), "GJS-N");
    assert_eq!(f.lambda(), 1.0);
    assert!(!f.lambda_free);
    assert_eq!(f.parameter_names().len(), 4);
}

#[test]
fn aic_counts_free_parameters() {
    let inst = instance(4, 80, GeneratorSpec::normal(), 1.0);
    let f = fit(&inst.model.clone().with_estimator(Estimator::Mle), &inst.y).unwrap();
    assert!((f.stats.aic - (-2.0 * f.loglik + 2.0 * 5.0)).abs() < 1e-9);
}

#[test]
fn likelihood_ratio_against_gjs() {
    let inst = instance(5, 150, GeneratorSpec::normal(), 3.0);
    let full = fit(&inst.model.clone().with_estimator(Estimator::Mle), &inst.y).unwrap();
    let reduced = fit(&inst.model.clone().with_lambda(LambdaPolicy::Gjs), &inst.y).unwrap();
    let lr = lr_test(&full, &reduced).unwrap();
    assert_eq!(lr.df, 1);
    assert!((lr.statistic - 2.0 * (full.loglik - reduced.loglik)).abs() < 1e-9);
    assert!(lr.p_value >= 0.0 && lr.p_value <= 1.0);
    assert!(lr_test(&reduced, &full).is_err());
}

#[test]
fn wald_intervals_cover_the_truth() {
    // 95% intervals for β₂ over 60 replicates
    let mut covered = 0;
    let total = 60;
    for seed in 0..total {
        let inst = instance(1000 + seed, 150, GeneratorSpec::normal(), 1.0);
        let m = inst.model.clone().with_lambda(LambdaPolicy::Gjs);
        let f = fit(&m, &inst.y).unwrap();
        let rows = wald_table(&f, 0.95).unwrap();
        let b2 = &rows[1];
        if b2.lower <= inst.theta.beta[1] && inst.theta.beta[1] <= b2.upper {
            covered += 1;
        }
    }
    assert!(covered >= 50, "covered {covered} of {total}");
}

#[test]
fn zeta_selection_minimises_upsilon() {
    let inst = instance(6, 120, GeneratorSpec::student_t(3.0).unwrap(), 1.0);
    let model = inst.model.clone().with_lambda(LambdaPolicy::Gjs);
    let grid = [2.0, 3.0, 5.0, 10.0];
    let sel = select_zeta(&model, &inst.y, &grid).unwrap();
    let best = sel
        .table
        .iter()
        .filter_map(|(z, u)| u.map(|u| (*z, u)))
        .fold((f64::NAN, f64::INFINITY), |acc, (z, u)| if u < acc.1 { (z, u) } else { acc });
    assert_eq!(sel.zeta, best.0);
    assert_eq!(sel.fit.zeta(), Some(sel.zeta));
    assert_eq!(sel.fit.zeta_table.len(), grid.len());
}

#[test]
fn generator_without_zeta_cannot_select() {
    let inst = instance(7, 40, GeneratorSpec::normal(), 1.0);
    assert!(select_zeta(&inst.model, &inst.y, &[]).is_err());
}

#[test]
fn upsilon_is_small_under_the_true_generator() {
    let generator = GeneratorSpec::normal();
    let z = generator.sample(9, 400);
    assert!(upsilon(&z, &generator) < 0.1);
    let heavy = GeneratorSpec::student_t(2.0).unwrap().sample(9, 400);
    assert!(upsilon(&heavy, &generator) > upsilon(&z, &generator));
}

#[test]
fn penalized_profile_is_defined_on_the_grid() {
    let inst = instance(8, 60, all_generators()[1], 1.0);
    let pt = penalized_profile_loglik(1.0, &inst.model, &inst.y, None).unwrap();
    assert!(pt.loglik.is_finite());
    assert!(pt.j_lambda_lambda > 0.0);
    assert!(pt.penalized.is_some());
}

#[test]
fn pmle_stays_inside_the_lambda_domain() {
    for seed in 0..10 {
        let inst = instance(200 + seed, 40, all_generators()[1], 1.0);
        let f = fit(&inst.model, &inst.y).unwrap();
        assert!(f.lambda() >= 0.02 - 1e-12 && f.lambda() <= 50.0);
        assert_eq!(f.estimator, Estimator::Pmle);
    }
}

#[test]
fn boundary_response_is_rejected() {
    let mut inst = instance(9, 30, GeneratorSpec::normal(), 1.0);
    inst.y[3] = 1.0;
    assert!(matches!(
        fit(&inst.model, &inst.y),
        Err(plreg::PlregError::BoundaryResponse { index: 3, .. })
    ));
}
