//! The power logit law `PL(μ, σ, λ; r)` on (0, 1) and its log-log limit.
//!
//! `Y ~ PL(μ, σ, λ; r)` when
//! `Z = [logit(Y^λ) - logit(μ^λ)] / σ ~ S(0, 1; r)`. `λ = 1` is the GJS
//! subfamily and `λ = 0` encodes the log-log law, where the transform becomes
//! `-log(-log y)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlregError, Result};
use crate::generators::{open_unit, GeneratorSpec};

/// `ln(1 - x^λ)` from `ln x`, without cancellation when `λ ln x` is near 0.
#[inline]
pub(crate) fn ln_one_minus_pow(lambda: f64, ln_x: f64) -> f64 {
    (-(lambda * ln_x).exp_m1()).ln()
}

/// Transform `t_λ(x) = log(x^λ / (1 - x^λ))`, or `-log(-log x)` for `λ = 0`.
#[inline]
pub fn transform(lambda: f64, x: f64) -> f64 {
    let ln_x = x.ln();
    if lambda == 0.0 {
        -(-ln_x).ln()
    } else {
        lambda * ln_x - ln_one_minus_pow(lambda, ln_x)
    }
}

/// Inverse of [`transform`].
#[inline]
pub fn transform_inverse(lambda: f64, a: f64) -> f64 {
    if lambda == 0.0 {
        (-(-a).exp()).exp()
    } else {
        // x^λ = 1 / (1 + e^{-a})
        (ln_logistic(a) / lambda).exp()
    }
}

/// `ln(1 / (1 + e^{-a}))`, stable for large |a|.
#[inline]
pub(crate) fn ln_logistic(a: f64) -> f64 {
    if a > 0.0 {
        -(-a).exp().ln_1p()
    } else {
        a - a.exp().ln_1p()
    }
}

/// Parameters of a power logit (or log-log) distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogitParams {
    mu: f64,
    sigma: f64,
    lambda: f64,
    generator: GeneratorSpec,
}

impl PowerLogitParams {
    /// `lambda = 0` selects the log-log law.
    pub fn new(mu: f64, sigma: f64, lambda: f64, generator: GeneratorSpec) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(PlregError::param("mu", mu, "0 < mu < 1"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(PlregError::param("sigma", sigma, "sigma > 0"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(PlregError::param("lambda", lambda, "lambda >= 0"));
        }
        Ok(Self {
            mu,
            sigma,
            lambda,
            generator,
        })
    }

    /// GJS law (`λ = 1`).
    pub fn gjs(mu: f64, sigma: f64, generator: GeneratorSpec) -> Result<Self> {
        Self::new(mu, sigma, 1.0, generator)
    }

    /// Log-log law (`λ → 0`).
    pub fn log_log(mu: f64, sigma: f64, generator: GeneratorSpec) -> Result<Self> {
        Self::new(mu, sigma, 0.0, generator)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }
    pub fn is_gjs(&self) -> bool {
        self.lambda == 1.0
    }
    pub fn is_log_log(&self) -> bool {
        self.lambda == 0.0
    }

    fn check_y(y: f64) -> Result<()> {
        if y > 0.0 && y < 1.0 {
            Ok(())
        } else {
            Err(PlregError::Domain(format!("y = {y} must lie strictly inside (0, 1)")))
        }
    }

    /// `z = h(y; μ, σ, λ)`.
    pub fn h(&self, y: f64) -> Result<f64> {
        Self::check_y(y)?;
        Ok(self.h_unchecked(y))
    }

    #[inline]
    pub(crate) fn h_unchecked(&self, y: f64) -> f64 {
        (transform(self.lambda, y) - transform(self.lambda, self.mu)) / self.sigma
    }

    /// Inverse transform: the `y` with `h(y) = z`.
    pub fn h_inverse(&self, z: f64) -> f64 {
        transform_inverse(self.lambda, transform(self.lambda, self.mu) + self.sigma * z)
    }

    /// Log density, including the Jacobian terms.
    pub fn log_pdf(&self, y: f64) -> Result<f64> {
        Self::check_y(y)?;
        let z = self.h_unchecked(y);
        let ln_y = y.ln();
        let jac = if self.lambda == 0.0 {
            -self.sigma.ln() - ln_y - (-ln_y).ln()
        } else {
            self.lambda.ln() - self.sigma.ln() - ln_y - ln_one_minus_pow(self.lambda, ln_y)
        };
        Ok(jac + self.generator.log_r(z * z))
    }

    pub fn pdf(&self, y: f64) -> Result<f64> {
        Ok(self.log_pdf(y)?.exp())
    }

    /// `F(y) = R(h(y))`.
    pub fn cdf(&self, y: f64) -> Result<f64> {
        Ok(self.generator.cdf(self.h(y)?))
    }

    /// `1 - F(y)`, accurate in the upper tail.
    pub fn sf(&self, y: f64) -> Result<f64> {
        Ok(self.generator.sf(self.h(y)?))
    }

    /// `F^{-1}(u)` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        Ok(self.h_inverse(self.generator.quantile(u)?))
    }

    /// `n` draws by inversion, deterministic in `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let z = self.generator.quantile(open_unit(rng)).expect("u in (0, 1)");
                // keep extreme draws representable inside the open interval
                self.h_inverse(z).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
            })
            .collect()
    }
}

/// Maps data on `(a, b)` to the unit interval: `y = (x - a) / (b - a)`.
pub fn rescale_to_unit(x: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(PlregError::Domain(format!("support ({a}, {b}) needs a < b")));
    }
    Ok(x.iter().map(|&v| (v - a) / (b - a)).collect())
}

/// Maps unit-interval values back to `(a, b)`: `x = (b - a) y + a`.
pub fn rescale_from_unit(y: &[f64], a: f64, b: f64) -> Vec<f64> {
    y.iter().map(|&v| (b - a) * v + a).collect()
}
