//! Density, cdf and quantiles of power logit laws for a few generators,
//! including the GJS (λ = 1) and log-log (λ → 0) special cases.
//!
//! cargo run --example distributions

use plreg::{GeneratorSpec, PowerLogitParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let generators = [
        GeneratorSpec::normal(),
        GeneratorSpec::student_t(4.0)?,
        GeneratorSpec::slash(1.4)?,
        GeneratorSpec::sinh_normal(1.5)?,
    ];
    let ys = [0.05, 0.2, 0.5, 0.8, 0.95];

    for g in generators {
        println!("generator {}", g.label());
        for lambda in [0.0, 0.5, 1.0, 3.0] {
            let law = if lambda == 0.0 {
                PowerLogitParams::log_log(0.5, 0.8, g)?
            } else {
                PowerLogitParams::new(0.5, 0.8, lambda, g)?
            };
            let pdf: Vec<String> = ys.iter().map(|&y| format!("{:.4}", law.pdf(y).unwrap())).collect();
            let q: Vec<String> = [0.1, 0.5, 0.9]
                .iter()
                .map(|&u| format!("{:.4}", law.quantile(u).unwrap()))
                .collect();
            println!("  lambda {lambda:<4} pdf {}  q(.1,.5,.9) {}", pdf.join(" "), q.join(" "));
        }
    }

    // the median is μ whatever σ and λ are
    let law = PowerLogitParams::new(0.3, 2.0, 7.5, GeneratorSpec::logistic_ii())?;
    println!("F(mu) = {}", law.cdf(0.3)?);

    let draws = law.sample(42, 5);
    println!("draws {draws:.4?}");
    Ok(())
}
