//! Wald and likelihood-ratio inference for fitted models.

use crate::error::{PlregError, Result};
use crate::regression::fit::FitResult;
use crate::special::{norm_quantile, norm_sf, regularized_upper_gamma};

/// Wald statistics for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct WaldRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Two-sided Wald tests and `level` confidence intervals for every
/// estimated parameter. Needs a positive definite observed information.
pub fn wald_table(fit: &FitResult, level: f64) -> Result<Vec<WaldRow>> {
    if !(0.0..1.0).contains(&level) {
        return Err(PlregError::param("level", level, "0 <= level < 1"));
    }
    let se = fit
        .std_errors
        .as_ref()
        .ok_or_else(|| PlregError::Singular("observed information is not positive definite".into()))?;
    let est = fit.estimates();
    let crit = if level == 0.0 { 0.0 } else { norm_quantile(0.5 + 0.5 * level) };
    Ok(fit
        .parameter_names()
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let (e, s) = (est[i], se[i]);
            let z = e / s;
            WaldRow {
                name,
                estimate: e,
                std_error: s,
                z,
                p_value: 2.0 * norm_sf(z.abs()),
                lower: e - crit * s,
                upper: e + crit * s,
            }
        })
        .collect())
}

/// Wald z statistic `estimate / std_error`.
pub fn wald_z(estimate: f64, std_error: f64) -> f64 {
    estimate / std_error
}

/// Likelihood-ratio test of a reduced model against a full one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// `LR = 2(ℓ_full - ℓ_reduced)` with a χ²(df) reference, where df is the
/// difference in estimated parameters. The fits must share the response
/// size, the generator family and the links, and the reduced model must
/// have fewer parameters.
pub fn lr_test(full: &FitResult, reduced: &FitResult) -> Result<LrTest> {
    let same_frame = full.model.n() == reduced.model.n()
        && full.model.generator.kind() == reduced.model.generator.kind()
        && full.model.median_link == reduced.model.median_link
        && full.model.dispersion_link == reduced.model.dispersion_link;
    if !same_frame || reduced.n_params() >= full.n_params() {
        return Err(PlregError::Usage(
            "likelihood-ratio test needs a reduced model nested in the full model".into(),
        ));
    }
    let df = full.n_params() - reduced.n_params();
    let statistic = (2.0 * (full.loglik - reduced.loglik)).max(0.0);
    let p_value = regularized_upper_gamma(0.5 * df as f64, 0.5 * statistic)?;
    Ok(LrTest { statistic, df, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wald_z_is_linear_in_inverse_se() {
        assert_eq!(wald_z(3.0, 1.5), 2.0);
        assert_eq!(wald_z(3.0, 3.0), 1.0);
    }
}
