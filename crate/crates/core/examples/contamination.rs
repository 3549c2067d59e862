//! The contamination experiment: a PL-N sample with one outlier and one
//! leverage point, fitted by PL-N and PL-t(5).
//!
//! cargo run --release --example contamination -- [seed]

use plreg::simharness::{run_contamination, ContaminationDesign};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let report = run_contamination(&ContaminationDesign::new(seed))?;
    println!("cases 39 and 40: x = {:?}, y = {:.3?}", &report.x[38..], &report.y_contaminated[38..]);
    for f in [&report.normal, &report.student_t] {
        println!("{}", f.label);
        println!("  clean beta        {:.3?}", f.clean.beta().as_slice());
        println!("  contaminated beta {:.3?}", f.contaminated.beta().as_slice());
        println!("  mean line shift   {:.4}", f.line_shift);
        println!("  top GL cases      {:?}", &f.gl_ranking()[..3]);
        println!("  top |r_p| cases   {:?}", &f.standardized_ranking()[..3]);
    }
    Ok(())
}
