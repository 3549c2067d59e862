//! Chooses the extra generator parameter ζ by minimising the Υ
//! discrepancy over a grid.
//!
//! cargo run --example select_zeta

use nalgebra::{DMatrix, DVector};
use plreg::regression::{select_zeta, ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use plreg::GeneratorSpec;
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 120;
    let mut rng = replicate_rng(21, 99);
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let truth = Theta::new(DVector::from_vec(vec![0.5, -1.0]), DVector::from_vec(vec![-0.8]), 1.5);
    let sim = ModelSpec::constant_dispersion(x.clone())?.with_generator(GeneratorSpec::power_exponential(1.4)?);
    let y = simulate_response(&sim, &truth, &mut replicate_rng(21, 0))?;

    for family in [GeneratorSpec::power_exponential(1.0)?, GeneratorSpec::student_t(5.0)?] {
        let model = ModelSpec::constant_dispersion(x.clone())?.with_generator(family);
        let sel = select_zeta(&model, &y, &[])?;
        println!("{}", family.kind().name());
        for (zeta, ups) in &sel.table {
            let mark = if *zeta == sel.zeta { " <" } else { "" };
            match ups {
                Some(u) => println!("  zeta {zeta:>6.2}  Upsilon {u:.5}{mark}"),
                None => println!("  zeta {zeta:>6.2}  fit failed"),
            }
        }
        println!("  selected {} with lambda = {:.3}", sel.fit.model.label(), sel.fit.lambda());
    }
    Ok(())
}
