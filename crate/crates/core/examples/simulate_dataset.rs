//! Draws a synthetic data set from a PL-t(5) regression with varying
//! dispersion and writes it as CSV.
//!
//! cargo run --example simulate_dataset -- out.csv [n] [seed]

use nalgebra::{DMatrix, DVector};
use plreg::regression::{ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use plreg::GeneratorSpec;
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let path = args.get(1).map(String::as_str).unwrap_or("synthetic.csv");
    let n: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(60);
    let seed: u64 = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(7);

    let mut rng = replicate_rng(seed, 1_000);
    let x1: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let group: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
    let s1: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

    let x = DMatrix::from_fn(n, 3, |i, j| [1.0, x1[i], group[i]][j]);
    let s = DMatrix::from_fn(n, 2, |i, j| [1.0, s1[i]][j]);
    let model = ModelSpec::new(x, s)?.with_generator(GeneratorSpec::student_t(5.0)?);
    let theta = Theta::new(
        DVector::from_vec(vec![-0.5, 1.2, 0.4]),
        DVector::from_vec(vec![-1.2, 0.6]),
        1.8,
    );
    let y = simulate_response(&model, &theta, &mut replicate_rng(seed, 0))?;

    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["y", "x1", "group", "s1"])?;
    for i in 0..n {
        w.write_record([y[i], x1[i], group[i], s1[i]].map(|v| format!("{v:.12}")))?;
    }
    w.flush()?;
    println!("wrote {n} rows to {path}");
    Ok(())
}
