//! Bias and √MSE of the mle and pmle for the PL-t(5) design at two
//! sample sizes.
//!
//! cargo run --release --example bias_study -- [replicates] [seed]

use plreg::regression::Estimator;
use plreg::simharness::{run_design, SimDesign};
use plreg::GeneratorSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let replicates: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(100);
    let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(2024);

    for n in [40, 120] {
        let design = SimDesign::table_one(GeneratorSpec::student_t(5.0)?, n, replicates, seed);
        let report = run_design(&design)?;
        println!("{} ({} of {} replicates used, {:.1} s)", design.name, report.used, replicates, report.wall_clock_secs);
        println!("  {:<8} {:>10} {:>10} {:>10} {:>10}", "param", "mle bias", "mle rmse", "pmle bias", "pmle rmse");
        for name in &report.parameter_names {
            let m = report.cell(Estimator::Mle, name).unwrap();
            let p = report.cell(Estimator::Pmle, name).unwrap();
            println!("  {name:<8} {:>10.4} {:>10.4} {:>10.4} {:>10.4}", m.bias, m.rmse, p.bias, p.rmse);
        }
        for s in &report.summaries {
            println!("  {} lambda at bound in {} replicates", s.estimator.name(), s.at_bound);
        }
    }
    Ok(())
}
