//! Fits GJS-t (λ = 1) and PL-t (λ free) models to the same skewed sample
//! and compares them with a likelihood-ratio test and AIC.
//!
//! cargo run --example fit_gjs_vs_pl

use nalgebra::{DMatrix, DVector};
use plreg::regression::{fit, lr_test, wald_table, LambdaPolicy, ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use plreg::GeneratorSpec;
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 150;
    let mut rng = replicate_rng(5, 99);
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let model = ModelSpec::constant_dispersion(x)?.with_generator(GeneratorSpec::student_t(5.0)?);
    let truth = Theta::new(DVector::from_vec(vec![-1.0, 2.0]), DVector::from_vec(vec![0.3]), 4.0);
    let y = simulate_response(&model, &truth, &mut replicate_rng(5, 0))?;

    let pl = fit(&model, &y)?;
    let gjs = fit(&model.clone().with_lambda(LambdaPolicy::Gjs), &y)?;

    for f in [&gjs, &pl] {
        println!("{}: loglik {:.3}  AIC {:.3}  Upsilon {:.4}", f.model.label(), f.loglik, f.stats.aic, f.stats.upsilon);
        for row in wald_table(f, 0.95)? {
            println!("  {:<18} {:>9.4} ({:.4})  p = {:.2e}", row.name, row.estimate, row.std_error, row.p_value);
        }
    }
    let lr = lr_test(&pl, &gjs)?;
    println!("LR = {:.3} on {} df, p = {:.2e}", lr.statistic, lr.df, lr.p_value);
    Ok(())
}
