use plreg::regression::{fit_with, Estimator, FitOptions, LambdaPolicy};
use plreg::simharness::*;
use plreg::GeneratorSpec;
use rand::Rng;

fn small_design() -> SimDesign {
    SimDesign::table_one(GeneratorSpec::student_t(5.0).unwrap(), 120, 12, 77)
}

#[test]
fn replicate_streams_are_reproducible_and_distinct() {
    let a: Vec<u64> = (0..4).map(|_| replicate_rng(3, 0).random()).collect();
    assert!(a.windows(2).all(|w| w[0] == w[1]));
    let x: u64 = replicate_rng(3, 0).random();
    let y: u64 = replicate_rng(3, 1).random();
    let z: u64 = replicate_rng(4, 0).random();
    assert!(x != y && x != z);
}

#[test]
fn runs_are_deterministic() {
    let d = small_design();
    let a = run_design(&d).unwrap();
    let b = run_design(&d).unwrap();
    assert_eq!(a.summaries, b.summaries);
    assert_eq!(a.used + a.failures, d.replicates);
}

#[test]
fn moments_match_a_direct_loop() {
    let d = small_design();
    let report = run_design(&d).unwrap();
    assert_eq!(report.failures, 0);
    let model = d.model().unwrap();
    let truth = d.theta().to_vector(true);
    for &e in &d.estimators {
        let m = model.clone().with_lambda(LambdaPolicy::Free).with_estimator(e);
        let estimates: Vec<Vec<f64>> = (0..d.replicates as u64)
            .map(|r| {
                let y = simulate_response(&model, &d.theta(), &mut replicate_rng(d.seed, r)).unwrap();
                let f = fit_with(&m, &y, None, &FitOptions::default()).unwrap();
                f.theta.to_vector(true).iter().cloned().collect()
            })
            .collect();
        let summary = report.summary(e).unwrap();
        for (k, cell) in summary.cells.iter().enumerate() {
            let n = estimates.len() as f64;
            let mean = estimates.iter().map(|v| v[k]).sum::<f64>() / n;
            let mse = estimates.iter().map(|v| (v[k] - truth[k]).powi(2)).sum::<f64>() / n;
            assert!((cell.mean - mean).abs() < 1e-10);
            assert!((cell.bias - (mean - truth[k])).abs() < 1e-10);
            assert!((cell.rmse - mse.sqrt()).abs() < 1e-10);
            assert!((cell.rmse.powi(2) - (cell.bias.powi(2) + cell.variance)).abs() < 1e-10);
        }
    }
    assert_eq!(report.parameter_names, ["beta1", "beta2", "tau1", "tau2", "lambda"]);
    assert!(report.cell(Estimator::Pmle, "lambda").is_some());
}

#[test]
fn covariates_are_fixed_across_runs() {
    let d = small_design();
    assert_eq!(d.model().unwrap().x(), d.model().unwrap().x());
    let mut other = d.clone();
    other.seed += 1;
    assert_ne!(d.model().unwrap().x(), other.model().unwrap().x());
}

#[test]
fn invalid_designs_are_rejected() {
    let mut d = small_design();
    d.replicates = 0;
    assert!(run_design(&d).is_err());
    let mut d = small_design();
    d.n = 4;
    assert!(run_design(&d).is_err());
}

#[test]
fn contamination_data_layout() {
    let design = ContaminationDesign::new(3);
    let (x, clean, dirty) = design.data().unwrap();
    assert_eq!(x.len(), 40);
    assert_eq!((x[38], x[39]), (0.8, 1.2));
    assert_eq!(&clean[..38], &dirty[..38]);
    assert_eq!(dirty[38], 0.9);
    assert_eq!(dirty[39], clean.iter().cloned().fold(0.0, f64::max));
}

#[test]
fn contamination_report_ranks_the_outlier() {
    let report = run_contamination(&ContaminationDesign::new(1)).unwrap();
    assert!(report.student_t.line_shift < report.normal.line_shift);
    assert!(report.normal.gl_ranking()[..2].contains(&40));
    assert_eq!(report.normal.r_q.len(), 40);
}
