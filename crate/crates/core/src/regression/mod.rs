//! Power logit regression: model specification, likelihood, fitting,
//! ζ selection and inference.

pub mod fit;
pub mod inference;
pub mod likelihood;
pub mod model;
pub mod order_stats;
pub mod zeta;

pub use fit::{
    fit, fit_at, fit_mle, fit_mle_with, fit_pmle, fit_pmle_with, fit_with, initial_values, penalized_profile_loglik,
    FitOptions, FitResult, FitStats, LambdaProfile, ProfilePoint,
};
pub use inference::{lr_test, wald_table, wald_z, LrTest, WaldRow};
pub use likelihood::{hessian, loglik, loglik_contributions, score, ScoreAndWeights, Theta};
pub use model::{Estimator, LambdaPolicy, ModelSpec, ZetaPolicy};
pub use order_stats::expected_normal_order_stats;
pub use zeta::{select_zeta, select_zeta_with, upsilon, ZetaSelection};
