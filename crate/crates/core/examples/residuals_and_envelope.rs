//! Quantile, deviance and standardized residuals of a fit, with a
//! simulated envelope for the quantile residuals.
//!
//! cargo run --release --example residuals_and_envelope

use nalgebra::{DMatrix, DVector};
use plreg::diagnostics::{deviance_residual, quantile_residual, simulated_envelope, standardized_residual, ResidualKind};
use plreg::regression::{fit, ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use plreg::GeneratorSpec;
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 50;
    let mut rng = replicate_rng(8, 99);
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let truth = Theta::new(DVector::from_vec(vec![1.0, -2.0]), DVector::from_vec(vec![-0.5]), 2.0);
    let model = ModelSpec::constant_dispersion(x)?.with_generator(GeneratorSpec::student_t(4.0)?);
    let y = simulate_response(&model, &truth, &mut replicate_rng(8, 0))?;
    let f = fit(&model, &y)?;

    let rq = quantile_residual(&f, &y)?;
    let rd = deviance_residual(&f, &y)?;
    let (rp, h) = standardized_residual(&f, &y)?;
    println!("{:>3} {:>9} {:>9} {:>9} {:>7}", "i", "r_q", "r_d", "r_p", "h_ii");
    for i in 0..8 {
        println!("{:>3} {:>9.4} {:>9.4} {:>9.4} {:>7.4}", i + 1, rq.values[i], rd.values[i], rp.values[i], h[i]);
    }

    let env = simulated_envelope(&f, &y, ResidualKind::Quantile, 99, 1)?;
    println!(
        "envelope from {} simulations ({} failed): {} of {n} ordered residuals outside",
        env.n_sim,
        env.failures,
        env.count_outside(&rq.values)
    );
    Ok(())
}
