//! PL-slash regression for the firm-cost data with constant and varying
//! dispersion. The data set is not bundled; pass the path of
//! `RiskSurvey.csv` (columns FIRMCOST, INDCOST, SIZELOG).
//!
//! cargo run --example firm_cost -- RiskSurvey.csv

use nalgebra::DMatrix;
use plreg::cli::data::read_csv;
use plreg::regression::{fit, lr_test, wald_table, ModelSpec};
use plreg::GeneratorSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: firm_cost <RiskSurvey.csv>");
        std::process::exit(1);
    };
    let table = read_csv(path.as_ref())?;
    let col = |name: &str| -> Result<Vec<f64>, Box<dyn std::error::Error>> {
        let h = table
            .headers
            .iter()
            .find(|h| h.eq_ignore_ascii_case(name))
            .ok_or(format!("no column {name}"))?;
        Ok(table.column(h)?.to_vec())
    };
    let mut y = col("firmcost")?;
    if y.iter().any(|&v| v >= 1.0) {
        y.iter_mut().for_each(|v| *v /= 100.0);
    }
    let (indcost, sizelog) = (col("indcost")?, col("sizelog")?);
    let n = y.len();
    let design = DMatrix::from_fn(n, 3, |i, j| [1.0, indcost[i], sizelog[i]][j]);
    let names = vec!["(intercept)".to_string(), "indcost".into(), "sizelog".into()];

    let varying = ModelSpec::new(design.clone(), design.clone())?
        .with_names(names.clone(), names.clone())?
        .with_generator(GeneratorSpec::slash(1.88)?);
    let constant = ModelSpec::constant_dispersion(design)?
        .with_names(names, vec!["(intercept)".into()])?
        .with_generator(GeneratorSpec::slash(2.29)?);

    let fv = fit(&varying, &y)?;
    let fc = fit(&constant, &y)?;
    for f in [&fv, &fc] {
        println!("{} (zeta {:?}) loglik {:.3}", f.model.label(), f.zeta(), f.loglik);
        for row in wald_table(f, 0.95)? {
            println!("  {:<22} {:>8.3} ({:.3})", row.name, row.estimate, row.std_error);
        }
    }
    let lr = lr_test(&fv, &fc)?;
    println!("LR (varying vs constant dispersion) = {:.3}, p = {:.3}", lr.statistic, lr.p_value);
    Ok(())
}
