//! Local influence under the four perturbation schemes, plus generalized
//! leverage, on a sample with one planted outlier.
//!
//! cargo run --example local_influence

use nalgebra::{DMatrix, DVector};
use plreg::diagnostics::{generalized_leverage, local_influence, PerturbationScheme};
use plreg::regression::{fit, ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use plreg::GeneratorSpec;
use rand::Rng;

fn top(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()));
    idx.into_iter().take(k).map(|i| i + 1).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 40;
    let mut rng = replicate_rng(4, 99);
    let x = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let s = DMatrix::from_fn(n, 2, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() });
    let model = ModelSpec::new(x, s)?
        .with_names(vec!["(intercept)".into(), "x".into()], vec!["(intercept)".into(), "s".into()])?;
    let truth = Theta::new(DVector::from_vec(vec![0.5, 1.0]), DVector::from_vec(vec![-1.5, 0.5]), 1.0);
    let mut y = simulate_response(&model, &truth, &mut replicate_rng(4, 0))?;
    y[n - 1] = 0.02;

    for generator in [GeneratorSpec::normal(), GeneratorSpec::student_t(4.0)?] {
        let f = fit(&model.clone().with_generator(generator), &y)?;
        println!("{}", f.model.label());
        for scheme in [
            PerturbationScheme::CaseWeights,
            PerturbationScheme::MedianCovariate(1),
            PerturbationScheme::DispersionCovariate(1),
            PerturbationScheme::Simultaneous(1, 1),
        ] {
            let li = local_influence(&f, &y, scheme)?;
            println!(
                "  {:<20} top |hmax| cases {:?}  top C cases {:?}",
                scheme.label(&f.model),
                top(&li.hmax, 3),
                top(&li.c, 3)
            );
        }
        println!("  generalized leverage top cases {:?}", top(&generalized_leverage(&f, &y)?, 3));
    }
    Ok(())
}
