//! The Υ discrepancy measure and selection of the generator parameter ζ.

use rayon::prelude::*;

use crate::error::{PlregError, Result};
use crate::generators::GeneratorSpec;
use crate::regression::fit::{fit_fixed_zeta, FitOptions, FitResult};
use crate::regression::model::{ModelSpec, ZetaPolicy};
use crate::regression::order_stats::expected_normal_order_stats;

/// `Υ = n⁻¹ Σ |Φ⁻¹[R(z₍ᵢ₎)] - υ₍ᵢ₎|` for fitted z-scores `z` and expected
/// normal order statistics `υ`.
pub fn upsilon(z: &[f64], generator: &GeneratorSpec) -> f64 {
    let n = z.len();
    if n == 0 {
        return f64::NAN;
    }
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    let expected = expected_normal_order_stats(n);
    sorted
        .iter()
        .zip(&expected)
        .map(|(&zi, &e)| (generator.normal_score(zi) - e).abs())
        .sum::<f64>()
        / n as f64
}

/// Outcome of ζ selection.
#[derive(Debug, Clone)]
pub struct ZetaSelection {
    pub zeta: f64,
    /// `(ζ, Υ_ζ)` in grid order; `None` where the fit failed.
    pub table: Vec<(f64, Option<f64>)>,
    /// The fit at the selected ζ, with `zeta_table` filled in.
    pub fit: FitResult,
}

/// Fits the model for every ζ in `grid` and returns the ζ with the smallest
/// Υ (ties go to the smaller ζ). An empty grid uses the family default.
pub fn select_zeta(model: &ModelSpec, y: &[f64], grid: &[f64]) -> Result<ZetaSelection> {
    select_zeta_with(model, y, grid, &FitOptions::default())
}

pub fn select_zeta_with(model: &ModelSpec, y: &[f64], grid: &[f64], opts: &FitOptions) -> Result<ZetaSelection> {
    let kind = model.generator.kind();
    if !kind.has_zeta() {
        return Err(PlregError::Usage(format!(
            "generator `{}` has no extra parameter to select",
            kind.name()
        )));
    }
    let mut grid: Vec<f64> = if grid.is_empty() { kind.default_zeta_grid() } else { grid.to_vec() };
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let fits: Vec<(f64, Result<FitResult>)> = grid
        .par_iter()
        .map(|&zeta| {
            let result = model.generator.with_zeta(zeta).and_then(|g| {
                let mut m = model.clone().with_generator(g);
                m.zeta_policy = ZetaPolicy::Fixed;
                fit_fixed_zeta(&m, y, None, opts)
            });
            (zeta, result)
        })
        .collect();
    let table: Vec<(f64, Option<f64>)> = fits
        .iter()
        .map(|(z, r)| (*z, r.as_ref().ok().map(|f| f.stats.upsilon).filter(|u| u.is_finite())))
        .collect();
    let best = table
        .iter()
        .enumerate()
        .filter_map(|(i, (_, u))| u.map(|u| (i, u)))
        .fold(None, |acc: Option<(usize, f64)>, (i, u)| match acc {
            Some((_, bu)) if bu <= u => acc,
            _ => Some((i, u)),
        });
    let Some((bi, _)) = best else {
        // every fit failed: report the first error
        let err = fits
            .into_iter()
            .find_map(|(_, r)| r.err())
            .unwrap_or_else(|| PlregError::Usage("empty zeta grid".into()));
        return Err(err);
    };
    let (zeta, result) = fits.into_iter().nth(bi).expect("best index");
    let mut fit = result.expect("successful fit");
    fit.model.zeta_policy = model.zeta_policy.clone();
    fit.zeta_table = table.clone();
    Ok(ZetaSelection { zeta, table, fit })
}
