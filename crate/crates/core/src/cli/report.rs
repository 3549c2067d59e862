//! Tab-separated diagnostic tables and the simulation report.

use std::fmt::Write as _;

use crate::diagnostics::{DiagnosticsReport, Envelope};
use crate::regression::FitResult;
use crate::simharness::SimReport;

/// Formats a report value with 10 significant digits; `NA` for NaN.
pub fn fmt_report(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v:.9e}")
    }
}

fn flags(diag: &DiagnosticsReport, i: usize) -> String {
    let mut f = Vec::new();
    if diag.r_q.flagged[i] {
        f.push("rq_clamped");
    }
    if diag.r_d.flagged[i] {
        f.push("rd_clamped");
    }
    if diag.r_p.flagged[i] {
        f.push("rp_undefined");
    }
    if f.is_empty() {
        "-".into()
    } else {
        f.join(",")
    }
}

/// One row per observation: residuals, leverages, influence and flags.
pub(crate) fn diagnostics_table(fit: &FitResult, y: &[f64], diag: &DiagnosticsReport) -> String {
    let mut out = String::from("index\ty\tmu\tr_q\tr_d\tr_p\tgl\th");
    for li in &diag.influence {
        let name = li.scheme.label(&fit.model);
        let _ = write!(out, "\thmax_abs[{name}]\tC[{name}]");
    }
    out.push_str("\tflags\n");
    for i in 0..y.len() {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            fmt_report(y[i]),
            fmt_report(fit.mu[i]),
            fmt_report(diag.r_q.values[i]),
            fmt_report(diag.r_d.values[i]),
            fmt_report(diag.r_p.values[i]),
            fmt_report(diag.gl_diag[i]),
            fmt_report(diag.hat_diag[i])
        );
        for li in &diag.influence {
            let _ = write!(out, "\t{}\t{}", fmt_report(li.hmax[i].abs()), fmt_report(li.c[i]));
        }
        let _ = writeln!(out, "\t{}", flags(diag, i));
    }
    out
}

/// Rank, sorted observed residual and the band, one row per observation.
pub(crate) fn envelope_table(env: &Envelope, observed: &[f64]) -> String {
    let mut sorted = observed.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = String::from("rank\tobserved\tlower\tmedian\tupper\n");
    for (k, v) in sorted.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            k + 1,
            fmt_report(*v),
            fmt_report(env.lower[k]),
            fmt_report(env.median[k]),
            fmt_report(env.upper[k])
        );
    }
    out
}

pub(crate) fn diagnostics_summary(fit: &FitResult, diag: &DiagnosticsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model = {}", fit.model.label());
    let _ = writeln!(out, "pseudo_r2 = {}", fmt_report(diag.fit_stats.pseudo_r2));
    let _ = writeln!(out, "upsilon = {}", fmt_report(diag.fit_stats.upsilon));
    let _ = writeln!(out, "rq_clamped = {}", diag.r_q.n_flagged());
    let _ = writeln!(out, "rd_clamped = {}", diag.r_d.n_flagged());
    let _ = writeln!(out, "rp_undefined = {}", diag.r_p.n_flagged());
    for li in &diag.influence {
        let _ = writeln!(out, "eigenvalue[{}] = {}", li.scheme.label(&fit.model), fmt_report(li.eigenvalue));
    }
    if let Some(env) = &diag.envelope {
        let _ = writeln!(out, "envelope_residual = {}", env.kind.name());
        let _ = writeln!(out, "envelope_simulations = {}", env.n_sim);
        let _ = writeln!(out, "envelope_failures = {}", env.failures);
    }
    out
}

/// The simulation report. Wall-clock time is left out so that reports
/// are reproducible byte for byte.
pub fn sim_report_text(report: &SimReport) -> String {
    let d = &report.design;
    let mut out = String::from("# plreg simulation report\n");
    let _ = writeln!(out, "design = {}", d.name);
    let _ = writeln!(out, "generator = {}", d.generator.label());
    let _ = writeln!(out, "n = {}", d.n);
    let _ = writeln!(out, "replicates = {}", d.replicates);
    let _ = writeln!(out, "seed = {}", d.seed);
    let _ = writeln!(out, "used = {}", report.used);
    let _ = writeln!(out, "failures = {}", report.failures);
    out.push_str("\n[moments]\nestimator\tparameter\ttruth\tbias\trmse\n");
    for s in &report.summaries {
        for (name, c) in report.parameter_names.iter().zip(&s.cells) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                s.estimator.name(),
                name,
                fmt_report(c.truth),
                fmt_report(c.bias),
                fmt_report(c.rmse)
            );
        }
    }
    out.push_str("\n[estimators]\nestimator\tfailures\tlambda_at_bound\n");
    for s in &report.summaries {
        let _ = writeln!(out, "{}\t{}\t{}", s.estimator.name(), s.failures, s.at_bound);
    }
    out
}
