use nalgebra::DMatrix;

use crate::error::{PlregError, Result};
use crate::generators::GeneratorSpec;
use crate::links::{DispersionLink, MedianLink};

/// Treatment of the skewness parameter λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    /// λ estimated.
    Free,
    /// λ held at a given positive value.
    Fixed(f64),
    /// λ = 1 (GJS model).
    Gjs,
    /// λ → 0 (log-log model).
    LogLog,
}

impl LambdaPolicy {
    /// The fixed value of λ, or `None` when λ is estimated.
    pub fn fixed_value(self) -> Option<f64> {
        match self {
            LambdaPolicy::Free => None,
            LambdaPolicy::Fixed(v) => Some(v),
            LambdaPolicy::Gjs => Some(1.0),
            LambdaPolicy::LogLog => Some(0.0),
        }
    }

    pub fn is_free(self) -> bool {
        matches!(self, LambdaPolicy::Free)
    }

    /// Parses `free`, `gjs`, `loglog` or `fixed=<value>`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        match t.as_str() {
            "free" => Ok(LambdaPolicy::Free),
            "gjs" => Ok(LambdaPolicy::Gjs),
            "loglog" | "log-log" => Ok(LambdaPolicy::LogLog),
            _ => {
                let value = t
                    .strip_prefix("fixed=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| {
                        PlregError::Usage(format!(
                            "lambda policy `{text}` is not one of free, gjs, loglog, fixed=<value>"
                        ))
                    })?;
                if value < 0.0 || !value.is_finite() {
                    return Err(PlregError::param("lambda", value, "lambda >= 0"));
                }
                Ok(if value == 0.0 {
                    LambdaPolicy::LogLog
                } else {
                    LambdaPolicy::Fixed(value)
                })
            }
        }
    }

    pub fn describe(self) -> String {
        match self {
            LambdaPolicy::Free => "free".into(),
            LambdaPolicy::Fixed(v) => format!("fixed={v}"),
            LambdaPolicy::Gjs => "gjs".into(),
            LambdaPolicy::LogLog => "loglog".into(),
        }
    }
}

/// Estimation method for a free λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Mle,
    Pmle,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Mle => "mle",
            Estimator::Pmle => "pmle",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "mle" => Some(Estimator::Mle),
            "pmle" => Some(Estimator::Pmle),
            _ => None,
        }
    }
}

/// How the generator's extra parameter ζ is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ZetaPolicy {
    /// Use the ζ stored in the generator.
    Fixed,
    /// Select ζ over a grid by minimising Υ.
    Auto(Vec<f64>),
}

/// A power logit regression model: designs, links, generator and
/// estimation choices.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    x: DMatrix<f64>,
    s: DMatrix<f64>,
    pub median_link: MedianLink,
    pub dispersion_link: DispersionLink,
    pub generator: GeneratorSpec,
    pub lambda_policy: LambdaPolicy,
    pub estimator: Estimator,
    pub zeta_policy: ZetaPolicy,
    pub median_names: Vec<String>,
    pub dispersion_names: Vec<String>,
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let tol = max * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON * 10.0;
    sv.iter().filter(|&&v| v > tol).count()
}

fn default_names(prefix: &str, k: usize) -> Vec<String> {
    (0..k)
        .map(|j| if j == 0 { "(intercept)".to_string() } else { format!("{prefix}{j}") })
        .collect()
}

impl ModelSpec {
    /// Builds a model with the default choices: logit and log links, normal
    /// generator, λ free, penalized estimation, fixed ζ.
    ///
    /// Both designs must have the same number of rows, full column rank and
    /// finite entries.
    pub fn new(x: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != s.nrows() {
            return Err(PlregError::Design(format!(
                "median design has {} rows but dispersion design has {}",
                x.nrows(),
                s.nrows()
            )));
        }
        if x.ncols() == 0 || s.ncols() == 0 {
            return Err(PlregError::Design("designs need at least one column".into()));
        }
        if x.iter().chain(s.iter()).any(|v| !v.is_finite()) {
            return Err(PlregError::Design("design matrices contain non-finite values".into()));
        }
        for (name, m) in [("median", &x), ("dispersion", &s)] {
            let rank = numerical_rank(m);
            if rank < m.ncols() {
                return Err(PlregError::Design(format!(
                    "{name} design has rank {rank} < {} columns",
                    m.ncols()
                )));
            }
        }
        let (p, q) = (x.ncols(), s.ncols());
        Ok(Self {
            x,
            s,
            median_link: MedianLink::Logit,
            dispersion_link: DispersionLink::Log,
            generator: GeneratorSpec::normal(),
            lambda_policy: LambdaPolicy::Free,
            estimator: Estimator::Pmle,
            zeta_policy: ZetaPolicy::Fixed,
            median_names: default_names("x", p),
            dispersion_names: default_names("s", q),
        })
    }

    /// Intercept-only dispersion submodel.
    pub fn constant_dispersion(x: DMatrix<f64>) -> Result<Self> {
        let n = x.nrows();
        Self::new(x, DMatrix::from_element(n, 1, 1.0))
    }

    pub fn with_median_link(mut self, link: MedianLink) -> Self {
        self.median_link = link;
        self
    }
    pub fn with_dispersion_link(mut self, link: DispersionLink) -> Self {
        self.dispersion_link = link;
        self
    }
    pub fn with_generator(mut self, generator: GeneratorSpec) -> Self {
        self.generator = generator;
        self
    }
    pub fn with_lambda(mut self, policy: LambdaPolicy) -> Self {
        self.lambda_policy = policy;
        self
    }
    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }
    pub fn with_zeta_policy(mut self, policy: ZetaPolicy) -> Self {
        self.zeta_policy = policy;
        self
    }
    pub fn with_names(mut self, median: Vec<String>, dispersion: Vec<String>) -> Result<Self> {
        if median.len() != self.p() || dispersion.len() != self.q() {
            return Err(PlregError::Design("covariate names do not match design columns".into()));
        }
        self.median_names = median;
        self.dispersion_names = dispersion;
        Ok(self)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }
    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }
    pub fn n(&self) -> usize {
        self.x.nrows()
    }
    pub fn p(&self) -> usize {
        self.x.ncols()
    }
    pub fn q(&self) -> usize {
        self.s.ncols()
    }

    /// Number of estimated parameters.
    pub fn n_free(&self) -> usize {
        self.p() + self.q() + usize::from(self.lambda_policy.is_free())
    }

    /// `PL-t(5)`, `GJS-N`, `log-log-slash(1.4)`, `PL(λ=2)-N`.
    pub fn label(&self) -> String {
        let family = match self.lambda_policy {
            LambdaPolicy::Free => "PL".to_string(),
            LambdaPolicy::Gjs => "GJS".to_string(),
            LambdaPolicy::LogLog => "log-log".to_string(),
            LambdaPolicy::Fixed(v) if v == 1.0 => "GJS".to_string(),
            LambdaPolicy::Fixed(v) => format!("PL(lambda={v})"),
        };
        format!("{family}-{}", self.generator.label())
    }

    /// Checks that `y` matches the design and lies strictly inside (0, 1).
    pub fn check_response(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.n() {
            return Err(PlregError::Design(format!(
                "response has {} values but the design has {} rows",
                y.len(),
                self.n()
            )));
        }
        if self.p() + self.q() + 1 >= self.n() {
            return Err(PlregError::Design(format!(
                "p + q + 1 = {} must be smaller than n = {}",
                self.p() + self.q() + 1,
                self.n()
            )));
        }
        for (i, &v) in y.iter().enumerate() {
            if !(v > 0.0 && v < 1.0) {
                return Err(PlregError::BoundaryResponse { index: i, value: v });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_deficient_design_is_rejected() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert!(ModelSpec::constant_dispersion(x).is_err());
    }

    #[test]
    fn lambda_policy_parsing() {
        assert_eq!(LambdaPolicy::parse("free").unwrap(), LambdaPolicy::Free);
        assert_eq!(LambdaPolicy::parse("GJS").unwrap(), LambdaPolicy::Gjs);
        assert_eq!(LambdaPolicy::parse("fixed=2.5").unwrap(), LambdaPolicy::Fixed(2.5));
        assert_eq!(LambdaPolicy::parse("fixed=0").unwrap(), LambdaPolicy::LogLog);
        assert!(LambdaPolicy::parse("fixed=-1").is_err());
        assert!(LambdaPolicy::parse("sometimes").is_err());
    }

    #[test]
    fn labels() {
        let x = DMatrix::from_fn(10, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let m = ModelSpec::constant_dispersion(x).unwrap();
        assert_eq!(m.label(), "PL-N");
        let m = m
            .with_lambda(LambdaPolicy::Gjs)
            .with_generator(GeneratorSpec::student_t(5.0).unwrap());
        assert_eq!(m.label(), "GJS-t(5)");
    }

    #[test]
    fn boundary_response_is_rejected() {
        let x = DMatrix::from_element(5, 1, 1.0);
        let m = ModelSpec::constant_dispersion(x).unwrap();
        let err = m.check_response(&[0.2, 0.3, 1.0, 0.5, 0.6]).unwrap_err();
        assert!(matches!(err, PlregError::BoundaryResponse { index: 2, .. }));
    }
}
