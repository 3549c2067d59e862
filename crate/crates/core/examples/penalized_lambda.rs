//! Usual and penalized profile log-likelihood of λ on a small sample,
//! with the mle and pmle that maximise them.
//!
//! cargo run --example penalized_lambda

use plreg::regression::{fit, penalized_profile_loglik, Estimator, Theta};
use plreg::simharness::{replicate_rng, simulate_response, SimDesign};
use plreg::GeneratorSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let design = SimDesign::table_one(GeneratorSpec::student_t(5.0)?, 40, 1, 2024);
    let model = design.model()?;
    let y = simulate_response(&model, &design.theta(), &mut replicate_rng(design.seed, 3))?;

    let mut start: Option<Theta> = None;
    println!("{:>8} {:>12} {:>12}", "lambda", "profile", "penalized");
    for k in 0..25 {
        let lambda = 0.05 * (1.0f64 / 0.05 * 8.0).powf(k as f64 / 24.0);
        let pt = penalized_profile_loglik(lambda, &model, &y, start.as_ref())?;
        let pen = pt.penalized.map_or("NA".to_string(), |v| format!("{v:.4}"));
        println!("{lambda:>8.4} {:>12.4} {pen:>12}", pt.loglik);
        start = Some(pt.theta);
    }

    let mle = fit(&model.clone().with_estimator(Estimator::Mle), &y)?;
    let pmle = fit(&model, &y)?;
    println!("mle  lambda = {:.4} (at bound: {})", mle.lambda(), mle.lambda_at_bound);
    println!("pmle lambda = {:.4} (at bound: {})", pmle.lambda(), pmle.lambda_at_bound);
    Ok(())
}
