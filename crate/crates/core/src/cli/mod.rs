//! Command-line front end: `plreg fit`, `plreg diag` and `plreg sim`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
//! Reports write floats with 10 significant digits (`{:.9e}`); fit
//! artifacts with 17 (`{:.16e}`), so they round-trip exactly.

pub mod artifact;
pub mod data;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

pub use artifact::{fmt_exact, CoefficientRow, FitArtifact};
pub use data::{read_csv, DataTable};
pub use report::{fmt_report, sim_report_text};

use crate::diagnostics::{diagnose, DiagnosticsOptions, PerturbationScheme, ResidualKind};
use crate::distribution::rescale_to_unit;
use crate::error::{PlregError, Result};
use crate::generators::{GeneratorKind, GeneratorSpec};
use crate::links::{DispersionLink, MedianLink};
use crate::regression::{
    fit, fit_at, wald_table, Estimator, FitResult, LambdaPolicy, ModelSpec, Theta, ZetaPolicy,
};
use crate::simharness::{run_design, SimDesign};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "plreg", version, about = "Power logit regression for responses in (0, 1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model and write a fit artifact.
    Fit(FitArgs),
    /// Residuals, leverage, local influence and envelopes for a saved fit.
    Diag(DiagArgs),
    /// Run a Monte Carlo design file.
    Sim(SimArgs),
}

#[derive(Debug, Args, Default)]
struct FitArgs {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    response: Option<String>,
    /// Comma-separated median covariates (an intercept is always added).
    #[arg(long)]
    median: Option<String>,
    /// Comma-separated dispersion covariates.
    #[arg(long)]
    dispersion: Option<String>,
    /// logit, probit, loglog or cloglog.
    #[arg(long)]
    link: Option<String>,
    /// log, sqrt or identity.
    #[arg(long = "dispersion-link")]
    dispersion_link: Option<String>,
    #[arg(long)]
    generator: Option<String>,
    /// A value, or `auto` to select over the family's grid.
    #[arg(long)]
    zeta: Option<String>,
    /// free, gjs, loglog or fixed=<value>.
    #[arg(long)]
    lambda: Option<String>,
    /// mle or pmle.
    #[arg(long)]
    estimator: Option<String>,
    /// Rescale the response from (a, b) to (0, 1): `--rescale a,b`.
    #[arg(long)]
    rescale: Option<String>,
    /// Output path of the fit artifact (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiagArgs {
    /// Fit artifact written by `plreg fit`.
    #[arg(long)]
    fit: PathBuf,
    /// Data file; defaults to the path recorded in the artifact.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Number of envelope simulations (0 disables the envelope).
    #[arg(long, default_value_t = 100)]
    envelope: usize,
    /// Residual used for the envelope: quantile, deviance or standardized.
    #[arg(long, default_value = "quantile")]
    residual: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Perturbation schemes: `case`, `median:<col>`, `dispersion:<col>`,
    /// `simultaneous:<col>:<col>`, comma separated.
    #[arg(long, default_value = "case")]
    perturb: String,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// TOML design file.
    #[arg(long)]
    design: PathBuf,
    /// Overrides the seed in the design file.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the replicate count in the design file.
    #[arg(long)]
    replicates: Option<usize>,
    /// Report path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Options of a fit, from a TOML config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    data: Option<PathBuf>,
    response: Option<String>,
    median: Option<Vec<String>>,
    dispersion: Option<Vec<String>>,
    link: Option<String>,
    dispersion_link: Option<String>,
    generator: Option<String>,
    zeta: Option<String>,
    lambda: Option<String>,
    estimator: Option<String>,
    rescale: Option<[f64; 2]>,
    out: Option<PathBuf>,
}

/// A complete, validated description of one fit.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: PathBuf,
    pub response: String,
    pub median: Vec<String>,
    pub dispersion: Vec<String>,
    pub median_link: MedianLink,
    pub dispersion_link: DispersionLink,
    pub generator: GeneratorKind,
    /// `None` selects ζ automatically.
    pub zeta: Option<f64>,
    pub zeta_auto: bool,
    pub lambda: LambdaPolicy,
    pub estimator: Estimator,
    pub rescale: Option<(f64, f64)>,
    pub out: Option<PathBuf>,
}

fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn usage(msg: impl Into<String>) -> PlregError {
    PlregError::Usage(msg.into())
}

impl RunConfig {
    fn from_args(args: FitArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let data = args.data.or(file.data).ok_or_else(|| usage("--data is required"))?;
        let response = args.response.or(file.response).ok_or_else(|| usage("--response is required"))?;
        let median = args.median.as_deref().map(split_list).or(file.median).unwrap_or_default();
        let dispersion = args
            .dispersion
            .as_deref()
            .map(split_list)
            .or(file.dispersion)
            .unwrap_or_default();
        let link = args.link.or(file.link).unwrap_or_else(|| "logit".into());
        let median_link =
            MedianLink::from_name(&link).ok_or_else(|| usage(format!("unknown median link `{link}`")))?;
        let dlink = args.dispersion_link.or(file.dispersion_link).unwrap_or_else(|| "log".into());
        let dispersion_link = DispersionLink::from_name(&dlink)
            .ok_or_else(|| usage(format!("unknown dispersion link `{dlink}`")))?;
        let gname = args.generator.or(file.generator).unwrap_or_else(|| "normal".into());
        let generator =
            GeneratorKind::from_name(&gname).ok_or_else(|| usage(format!("unknown generator `{gname}`")))?;
        let zeta_text = args.zeta.or(file.zeta);
        let (zeta, zeta_auto) = match zeta_text.as_deref() {
            None if generator.has_zeta() => {
                return Err(usage(format!("generator `{gname}` needs --zeta <value|auto>")))
            }
            None => (None, false),
            Some("auto") => (None, true),
            Some(v) => (
                Some(v.parse::<f64>().map_err(|_| usage(format!("--zeta `{v}` is not a number or `auto`")))?),
                false,
            ),
        };
        let lambda = LambdaPolicy::parse(&args.lambda.or(file.lambda).unwrap_or_else(|| "free".into()))?;
        let ename = args.estimator.or(file.estimator).unwrap_or_else(|| "pmle".into());
        let estimator =
            Estimator::from_name(&ename).ok_or_else(|| usage(format!("unknown estimator `{ename}`")))?;
        let rescale = match (args.rescale, file.rescale) {
            (Some(text), _) => {
                let parts: Vec<f64> = text
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| usage(format!("--rescale `{text}` must be `a,b`")))?;
                match parts[..] {
                    [a, b] => Some((a, b)),
                    _ => return Err(usage(format!("--rescale `{text}` must be `a,b`"))),
                }
            }
            (None, Some([a, b])) => Some((a, b)),
            (None, None) => None,
        };
        Ok(Self {
            data,
            response,
            median,
            dispersion,
            median_link,
            dispersion_link,
            generator,
            zeta,
            zeta_auto,
            lambda,
            estimator,
            rescale,
            out: args.out.or(file.out),
        })
    }

    /// Every column the fit reads, response first.
    pub fn columns(&self) -> Vec<String> {
        let mut c = vec![self.response.clone()];
        c.extend(self.median.iter().cloned());
        c.extend(self.dispersion.iter().cloned());
        c
    }
}

fn design(table: &DataTable, columns: &[String]) -> Result<DMatrix<f64>> {
    let n = table.rows();
    let mut m = DMatrix::from_element(n, columns.len() + 1, 1.0);
    for (j, name) in columns.iter().enumerate() {
        let col = table.column(name)?;
        for i in 0..n {
            m[(i, j + 1)] = col[i];
        }
    }
    Ok(m)
}

fn with_intercept(names: &[String]) -> Vec<String> {
    let mut v = vec!["(intercept)".to_string()];
    v.extend(names.iter().cloned());
    v
}

/// Builds the model and the response from a config and its data.
#[allow(clippy::too_many_arguments)]
fn build_model(
    table: &DataTable,
    response: &str,
    median: &[String],
    dispersion: &[String],
    rescale: Option<(f64, f64)>,
    median_link: MedianLink,
    dispersion_link: DispersionLink,
    generator: GeneratorSpec,
) -> Result<(ModelSpec, Vec<f64>)> {
    let raw = table.column(response)?;
    let y = match rescale {
        Some((a, b)) => rescale_to_unit(raw, a, b)?,
        None => raw.to_vec(),
    };
    let x = design(table, median)?;
    let s = design(table, dispersion)?;
    let model = ModelSpec::new(x, s)?
        .with_median_link(median_link)
        .with_dispersion_link(dispersion_link)
        .with_generator(generator)
        .with_names(with_intercept(median), with_intercept(dispersion))?;
    model.check_response(&y)?;
    Ok((model, y))
}

/// Fits the model described by `config`.
pub fn run_fit(config: &RunConfig) -> Result<(FitResult, Vec<f64>, FitArtifact)> {
    let table = read_csv(&config.data)?;
    let placeholder = match (config.zeta, config.zeta_auto) {
        (Some(z), _) => Some(z),
        (None, true) => config.generator.default_zeta_grid().first().copied(),
        (None, false) => None,
    };
    let generator = GeneratorSpec::new(config.generator, placeholder)?;
    let (mut model, y) = build_model(
        &table,
        &config.response,
        &config.median,
        &config.dispersion,
        config.rescale,
        config.median_link,
        config.dispersion_link,
        generator,
    )?;
    model = model.with_lambda(config.lambda).with_estimator(config.estimator);
    if config.zeta_auto {
        model = model.with_zeta_policy(ZetaPolicy::Auto(Vec::new()));
    }
    let result = fit(&model, &y)?;
    let artifact = to_artifact(config, &table, &result)?;
    Ok((result, y, artifact))
}

fn to_artifact(config: &RunConfig, table: &DataTable, fit: &FitResult) -> Result<FitArtifact> {
    let coefficients = match wald_table(fit, 0.95) {
        Ok(rows) => rows
            .into_iter()
            .map(|r| CoefficientRow {
                name: r.name,
                estimate: r.estimate,
                std_error: r.std_error,
                z: r.z,
                p_value: r.p_value,
                lower: r.lower,
                upper: r.upper,
            })
            .collect(),
        Err(_) => fit
            .parameter_names()
            .into_iter()
            .zip(fit.estimates().iter())
            .map(|(name, &estimate)| CoefficientRow {
                name,
                estimate,
                std_error: f64::NAN,
                z: f64::NAN,
                p_value: f64::NAN,
                lower: f64::NAN,
                upper: f64::NAN,
            })
            .collect(),
    };
    Ok(FitArtifact {
        model: fit.model.label(),
        data_path: config.data.display().to_string(),
        data_hash: table.hash(&config.columns())?,
        rows: table.rows(),
        response: config.response.clone(),
        median: config.median.clone(),
        dispersion: config.dispersion.clone(),
        rescale: config.rescale,
        median_link: fit.model.median_link.name().to_string(),
        dispersion_link: fit.model.dispersion_link.name().to_string(),
        generator: fit.model.generator.kind().name().to_string(),
        zeta: fit.zeta(),
        zeta_policy: if config.zeta_auto { "auto".into() } else { "fixed".into() },
        lambda_policy: fit.model.lambda_policy.describe(),
        estimator: fit.estimator.name().to_string(),
        converged: fit.converged,
        iterations: fit.iterations,
        lambda_at_bound: fit.lambda_at_bound,
        loglik: fit.loglik,
        aic: fit.stats.aic,
        pseudo_r2: fit.stats.pseudo_r2,
        upsilon: fit.stats.upsilon,
        max_abs_score: fit.max_abs_score,
        beta: fit.beta().iter().cloned().collect(),
        tau: fit.tau().iter().cloned().collect(),
        lambda: fit.lambda(),
        coefficients,
        zeta_table: fit.zeta_table.clone(),
    })
}

/// Rebuilds a fit from an artifact and the data it was fitted to.
pub fn restore_fit(artifact: &FitArtifact, table: &DataTable) -> Result<(FitResult, Vec<f64>)> {
    if table.rows() != artifact.rows {
        return Err(usage(format!(
            "data has {} rows but the fit was made on {}",
            table.rows(),
            artifact.rows
        )));
    }
    let mut columns = vec![artifact.response.clone()];
    columns.extend(artifact.median.iter().cloned());
    columns.extend(artifact.dispersion.iter().cloned());
    if table.hash(&columns)? != artifact.data_hash {
        return Err(usage("data columns do not match the fit artifact (hash mismatch)"));
    }
    let parse_err = |what: &str, v: &str| PlregError::Parse(format!("fit artifact: unknown {what} `{v}`"));
    let median_link =
        MedianLink::from_name(&artifact.median_link).ok_or_else(|| parse_err("link", &artifact.median_link))?;
    let dispersion_link = DispersionLink::from_name(&artifact.dispersion_link)
        .ok_or_else(|| parse_err("dispersion link", &artifact.dispersion_link))?;
    let kind =
        GeneratorKind::from_name(&artifact.generator).ok_or_else(|| parse_err("generator", &artifact.generator))?;
    let generator = GeneratorSpec::new(kind, artifact.zeta)?;
    let lambda_policy = LambdaPolicy::parse(&artifact.lambda_policy)?;
    let estimator =
        Estimator::from_name(&artifact.estimator).ok_or_else(|| parse_err("estimator", &artifact.estimator))?;
    let (model, y) = build_model(
        table,
        &artifact.response,
        &artifact.median,
        &artifact.dispersion,
        artifact.rescale,
        median_link,
        dispersion_link,
        generator,
    )?;
    let model = model.with_lambda(lambda_policy).with_estimator(estimator);
    if artifact.beta.len() != model.p() || artifact.tau.len() != model.q() {
        return Err(PlregError::Parse("fit artifact: coefficient counts do not match the design".into()));
    }
    let theta = Theta::new(
        DVector::from_column_slice(&artifact.beta),
        DVector::from_column_slice(&artifact.tau),
        artifact.lambda,
    );
    let mut fit = fit_at(
        &model,
        &y,
        theta,
        lambda_policy.is_free(),
        estimator,
        artifact.converged,
        artifact.iterations,
    )?;
    fit.lambda_at_bound = artifact.lambda_at_bound;
    fit.zeta_table = artifact.zeta_table.clone();
    Ok((fit, y))
}

fn parse_schemes(text: &str, model: &ModelSpec) -> Result<Vec<PerturbationScheme>> {
    let find = |names: &[String], col: &str, which: &str| -> Result<usize> {
        names
            .iter()
            .position(|n| n == col)
            .filter(|&k| k > 0)
            .ok_or_else(|| usage(format!("`{col}` is not a {which} covariate of the fit")))
    };
    split_list(text)
        .iter()
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            match parts[..] {
                ["case"] => Ok(PerturbationScheme::CaseWeights),
                ["median", c] => Ok(PerturbationScheme::MedianCovariate(find(&model.median_names, c, "median")?)),
                ["dispersion", c] => Ok(PerturbationScheme::DispersionCovariate(find(
                    &model.dispersion_names,
                    c,
                    "dispersion",
                )?)),
                ["simultaneous", a, b] => Ok(PerturbationScheme::Simultaneous(
                    find(&model.median_names, a, "median")?,
                    find(&model.dispersion_names, b, "dispersion")?,
                )),
                _ => Err(usage(format!("unknown perturbation scheme `{item}`"))),
            }
        })
        .collect()
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let config = RunConfig::from_args(args)?;
    let (_, _, artifact) = run_fit(&config)?;
    write_output(config.out.as_deref(), &artifact.to_text())
}

fn cmd_diag(args: DiagArgs) -> Result<()> {
    let text = fs::read_to_string(&args.fit)
        .map_err(|e| PlregError::Parse(format!("{}: {e}", args.fit.display())))?;
    let artifact = FitArtifact::parse(&text)?;
    let data_path = args.data.clone().unwrap_or_else(|| PathBuf::from(&artifact.data_path));
    let table = read_csv(&data_path)?;
    let (fit, y) = restore_fit(&artifact, &table)?;
    let kind = ResidualKind::from_name(&args.residual)
        .ok_or_else(|| usage(format!("unknown residual kind `{}`", args.residual)))?;
    let opts = DiagnosticsOptions {
        schemes: parse_schemes(&args.perturb, &fit.model)?,
        envelope: (args.envelope > 0).then_some((kind, args.envelope, args.seed)),
    };
    let diag = diagnose(&fit, &y, &opts)?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("diagnostics.tsv"), report::diagnostics_table(&fit, &y, &diag))?;
    if let Some(env) = &diag.envelope {
        let observed = crate::diagnostics::residuals(&fit, &y, kind)?;
        fs::write(args.out.join("envelope.tsv"), report::envelope_table(env, &observed.values))?;
    }
    fs::write(args.out.join("summary.txt"), report::diagnostics_summary(&fit, &diag))?;
    Ok(())
}

/// A simulation design file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignFile {
    name: Option<String>,
    generator: String,
    zeta: Option<f64>,
    beta: Vec<f64>,
    tau: Vec<f64>,
    lambda: f64,
    n: usize,
    replicates: usize,
    seed: u64,
    estimators: Option<Vec<String>>,
    link: Option<String>,
    dispersion_link: Option<String>,
}

/// Reads a TOML design file.
pub fn read_design(path: &Path) -> Result<SimDesign> {
    let text = fs::read_to_string(path).map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?;
    let file: DesignFile = toml::from_str(&text).map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?;
    let kind = GeneratorKind::from_name(&file.generator)
        .ok_or_else(|| PlregError::Parse(format!("{}: unknown generator `{}`", path.display(), file.generator)))?;
    let generator = GeneratorSpec::new(kind, file.zeta)?;
    let estimators = file
        .estimators
        .unwrap_or_else(|| vec!["mle".into(), "pmle".into()])
        .iter()
        .map(|e| {
            Estimator::from_name(e)
                .ok_or_else(|| PlregError::Parse(format!("{}: unknown estimator `{e}`", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let median_link = match file.link {
        Some(l) => MedianLink::from_name(&l)
            .ok_or_else(|| PlregError::Parse(format!("{}: unknown link `{l}`", path.display())))?,
        None => MedianLink::Logit,
    };
    let dispersion_link = match file.dispersion_link {
        Some(l) => DispersionLink::from_name(&l)
            .ok_or_else(|| PlregError::Parse(format!("{}: unknown dispersion link `{l}`", path.display())))?,
        None => DispersionLink::Log,
    };
    Ok(SimDesign {
        name: file.name.unwrap_or_else(|| format!("PL-{} n={}", generator.label(), file.n)),
        generator,
        beta: file.beta,
        tau: file.tau,
        lambda: file.lambda,
        n: file.n,
        replicates: file.replicates,
        seed: file.seed,
        estimators,
        median_link,
        dispersion_link,
    })
}

fn cmd_sim(args: SimArgs) -> Result<()> {
    let mut design = read_design(&args.design)?;
    if let Some(seed) = args.seed {
        design.seed = seed;
    }
    if let Some(r) = args.replicates {
        design.replicates = r;
    }
    let report = run_design(&design)?;
    eprintln!("{} replicates in {:.1} s", design.replicates, report.wall_clock_secs);
    write_output(args.out.as_deref(), &sim_report_text(&report))
}

/// Exit code for an error.
pub fn exit_code(err: &PlregError) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Diag(a) => cmd_diag(a),
        Command::Sim(a) => cmd_sim(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("plreg: {e}");
            exit_code(&e)
        }
    }
}
