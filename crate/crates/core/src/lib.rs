//! Power logit, GJS and log-log regression for continuous responses on the
//! unit interval.
//!
//! The crate is organised bottom-up:
//!
//! * [`generators`]: the eight symmetric density generators and their
//!   constants.
//! * [`distribution`]: the power logit law `PL(μ, σ, λ; r)` and its log-log
//!   limit.
//! * [`regression`]: model specification, likelihood, score, observed
//!   information, MLE / penalized MLE fitting, ζ selection and inference.
//! * [`diagnostics`]: residuals, local influence, generalized leverage,
//!   simulated envelopes and fit statistics.
//! * [`simharness`]: Monte Carlo bias/RMSE studies and the contamination
//!   experiment.
//! * [`cli`]: the `plreg` command-line front end.

pub mod cli;
pub mod diagnostics;
pub mod distribution;
pub mod error;
pub mod generators;
pub mod links;
pub mod optim;
pub mod quadrature;
pub mod regression;
pub mod simharness;
pub mod special;

pub use distribution::PowerLogitParams;
pub use error::{PlregError, Result};
pub use generators::{GeneratorKind, GeneratorSpec};
