//! Runs `plreg fit` and `plreg diag` in-process on a freshly simulated
//! data set and lists the files produced.
//!
//! cargo run --release --example cli_walkthrough -- [out-dir]

use nalgebra::{DMatrix, DVector};
use plreg::regression::{ModelSpec, Theta};
use plreg::simharness::{replicate_rng, simulate_response};
use rand::Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plreg-walkthrough".into()));
    std::fs::create_dir_all(&dir)?;

    let n = 60;
    let mut rng = replicate_rng(3, 99);
    let x1: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let model = ModelSpec::constant_dispersion(DMatrix::from_fn(n, 2, |i, j| [1.0, x1[i]][j]))?;
    let theta = Theta::new(DVector::from_vec(vec![-0.3, 1.1]), DVector::from_vec(vec![-0.4]), 2.5);
    let y = simulate_response(&model, &theta, &mut replicate_rng(3, 0))?;
    let data = dir.join("data.csv");
    let mut w = csv::Writer::from_path(&data)?;
    w.write_record(["y", "x1"])?;
    for i in 0..n {
        w.write_record([format!("{:.12}", y[i]), format!("{:.12}", x1[i])])?;
    }
    w.flush()?;

    let fit_path = dir.join("fit.txt");
    let (d, f, o) = (data.to_str().unwrap(), fit_path.to_str().unwrap(), dir.to_str().unwrap());
    let code = plreg::cli::run(["plreg", "fit", "--data", d, "--response", "y", "--median", "x1", "--out", f]);
    println!("plreg fit  -> exit {code}");
    let code = plreg::cli::run([
        "plreg", "diag", "--fit", f, "--out", o, "--envelope", "39", "--perturb", "case,median:x1",
    ]);
    println!("plreg diag -> exit {code}");
    for entry in std::fs::read_dir(&dir)? {
        println!("  {}", entry?.path().display());
    }
    Ok(())
}
