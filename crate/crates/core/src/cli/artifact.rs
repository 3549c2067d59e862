//! The fit artifact: a key/value text document with tab-separated tables.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`; `NA` marks missing values.

use std::fmt::Write as _;

use crate::error::{PlregError, Result};

const MAGIC: &str = "# plreg fit artifact v1";

/// Formats a float for artifacts.
pub fn fmt_exact(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_float(text: &str, line: usize) -> Result<f64> {
    if text == "NA" {
        return Ok(f64::NAN);
    }
    text.parse()
        .map_err(|_| PlregError::Parse(format!("fit artifact line {line}: `{text}` is not a number")))
}

/// One row of the coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Contents of a fit artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct FitArtifact {
    pub model: String,
    pub data_path: String,
    pub data_hash: String,
    pub rows: usize,
    pub response: String,
    pub median: Vec<String>,
    pub dispersion: Vec<String>,
    pub rescale: Option<(f64, f64)>,
    pub median_link: String,
    pub dispersion_link: String,
    pub generator: String,
    pub zeta: Option<f64>,
    pub zeta_policy: String,
    pub lambda_policy: String,
    pub estimator: String,
    pub converged: bool,
    pub iterations: usize,
    pub lambda_at_bound: bool,
    pub loglik: f64,
    pub aic: f64,
    pub pseudo_r2: f64,
    pub upsilon: f64,
    pub max_abs_score: f64,
    pub beta: Vec<f64>,
    pub tau: Vec<f64>,
    pub lambda: f64,
    pub coefficients: Vec<CoefficientRow>,
    pub zeta_table: Vec<(f64, Option<f64>)>,
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| fmt_exact(*x)).collect::<Vec<_>>().join(",")
}

impl FitArtifact {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("model", self.model.clone());
        kv("data_path", self.data_path.clone());
        kv("data_hash", self.data_hash.clone());
        kv("rows", self.rows.to_string());
        kv("response", self.response.clone());
        kv("median", self.median.join(","));
        kv("dispersion", self.dispersion.join(","));
        kv(
            "rescale",
            match self.rescale {
                Some((a, b)) => format!("{},{}", fmt_exact(a), fmt_exact(b)),
                None => "none".into(),
            },
        );
        kv("median_link", self.median_link.clone());
        kv("dispersion_link", self.dispersion_link.clone());
        kv("generator", self.generator.clone());
        kv("zeta", self.zeta.map_or("none".into(), fmt_exact));
        kv("zeta_policy", self.zeta_policy.clone());
        kv("lambda_policy", self.lambda_policy.clone());
        kv("estimator", self.estimator.clone());
        kv("converged", self.converged.to_string());
        kv("iterations", self.iterations.to_string());
        kv("lambda_at_bound", self.lambda_at_bound.to_string());
        kv("loglik", fmt_exact(self.loglik));
        kv("aic", fmt_exact(self.aic));
        kv("pseudo_r2", fmt_exact(self.pseudo_r2));
        kv("upsilon", fmt_exact(self.upsilon));
        kv("max_abs_score", fmt_exact(self.max_abs_score));
        kv("beta", join_floats(&self.beta));
        kv("tau", join_floats(&self.tau));
        kv("lambda", fmt_exact(self.lambda));
        let mut out = format!("{MAGIC}\n{s}");
        out.push_str("\n[coefficients]\nname\testimate\tstd_error\tz\tp_value\tci95_lower\tci95_upper\n");
        for r in &self.coefficients {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.name,
                fmt_exact(r.estimate),
                fmt_exact(r.std_error),
                fmt_exact(r.z),
                fmt_exact(r.p_value),
                fmt_exact(r.lower),
                fmt_exact(r.upper)
            );
        }
        out.push_str("\n[zeta_table]\nzeta\tupsilon\n");
        for (z, u) in &self.zeta_table {
            let _ = writeln!(out, "{}\t{}", fmt_exact(*z), u.map_or("NA".into(), fmt_exact));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => return Err(PlregError::Parse("not a plreg fit artifact (missing header line)".into())),
        }
        let mut keys: Vec<(String, String, usize)> = Vec::new();
        let mut section = String::new();
        let mut coefficients = Vec::new();
        let mut zeta_table = Vec::new();
        let mut skip_header = false;
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.to_string();
                skip_header = true;
                continue;
            }
            if skip_header {
                skip_header = false;
                continue;
            }
            match section.as_str() {
                "" => {
                    let (k, v) = line
                        .split_once(" = ")
                        .ok_or_else(|| PlregError::Parse(format!("fit artifact line {no}: expected `key = value`")))?;
                    keys.push((k.to_string(), v.to_string(), no));
                }
                "coefficients" => {
                    let f: Vec<&str> = line.split('\t').collect();
                    if f.len() != 7 {
                        return Err(PlregError::Parse(format!("fit artifact line {no}: expected 7 fields")));
                    }
                    coefficients.push(CoefficientRow {
                        name: f[0].to_string(),
                        estimate: parse_float(f[1], no)?,
                        std_error: parse_float(f[2], no)?,
                        z: parse_float(f[3], no)?,
                        p_value: parse_float(f[4], no)?,
                        lower: parse_float(f[5], no)?,
                        upper: parse_float(f[6], no)?,
                    });
                }
                "zeta_table" => {
                    let (a, b) = line
                        .split_once('\t')
                        .ok_or_else(|| PlregError::Parse(format!("fit artifact line {no}: expected 2 fields")))?;
                    let u = parse_float(b, no)?;
                    zeta_table.push((parse_float(a, no)?, if u.is_nan() { None } else { Some(u) }));
                }
                other => return Err(PlregError::Parse(format!("fit artifact line {no}: unknown section `{other}`"))),
            }
        }
        let get = |k: &str| -> Result<(&str, usize)> {
            keys.iter()
                .find(|(key, _, _)| key == k)
                .map(|(_, v, no)| (v.as_str(), *no))
                .ok_or_else(|| PlregError::Parse(format!("fit artifact lacks key `{k}`")))
        };
        let text_of = |k: &str| get(k).map(|(v, _)| v.to_string());
        let float_of = |k: &str| get(k).and_then(|(v, no)| parse_float(v, no));
        let list_of = |k: &str| -> Result<Vec<String>> {
            let v = text_of(k)?;
            Ok(if v.is_empty() { Vec::new() } else { v.split(',').map(str::to_string).collect() })
        };
        let floats_of = |k: &str| -> Result<Vec<f64>> {
            let (v, no) = get(k)?;
            v.split(',').map(|x| parse_float(x, no)).collect()
        };
        let bool_of = |k: &str| -> Result<bool> {
            let (v, no) = get(k)?;
            v.parse()
                .map_err(|_| PlregError::Parse(format!("fit artifact line {no}: `{v}` is not true/false")))
        };
        let usize_of = |k: &str| -> Result<usize> {
            let (v, no) = get(k)?;
            v.parse()
                .map_err(|_| PlregError::Parse(format!("fit artifact line {no}: `{v}` is not a count")))
        };
        let rescale = match get("rescale")? {
            ("none", _) => None,
            (v, no) => {
                let (a, b) = v
                    .split_once(',')
                    .ok_or_else(|| PlregError::Parse(format!("fit artifact line {no}: bad rescale")))?;
                Some((parse_float(a, no)?, parse_float(b, no)?))
            }
        };
        let zeta = match get("zeta")? {
            ("none", _) => None,
            (v, no) => Some(parse_float(v, no)?),
        };
        Ok(Self {
            model: text_of("model")?,
            data_path: text_of("data_path")?,
            data_hash: text_of("data_hash")?,
            rows: usize_of("rows")?,
            response: text_of("response")?,
            median: list_of("median")?,
            dispersion: list_of("dispersion")?,
            rescale,
            median_link: text_of("median_link")?,
            dispersion_link: text_of("dispersion_link")?,
            generator: text_of("generator")?,
            zeta,
            zeta_policy: text_of("zeta_policy")?,
            lambda_policy: text_of("lambda_policy")?,
            estimator: text_of("estimator")?,
            converged: bool_of("converged")?,
            iterations: usize_of("iterations")?,
            lambda_at_bound: bool_of("lambda_at_bound")?,
            loglik: float_of("loglik")?,
            aic: float_of("aic")?,
            pseudo_r2: float_of("pseudo_r2")?,
            upsilon: float_of("upsilon")?,
            max_abs_score: float_of("max_abs_score")?,
            beta: floats_of("beta")?,
            tau: floats_of("tau")?,
            lambda: float_of("lambda")?,
            coefficients,
            zeta_table,
        })
    }
}
