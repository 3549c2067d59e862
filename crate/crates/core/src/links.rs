//! Link functions for the median and dispersion submodels.
//!
//! Each link `d` maps the parameter to the linear predictor `η = d(θ)`.
//! `d1` and `d2` are the first and second derivatives of `d` with respect to
//! the parameter.

use crate::error::{PlregError, Result};
use crate::special::{norm_cdf, norm_pdf, norm_quantile};

/// Links for the median `μ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MedianLink {
    Logit,
    Probit,
    LogLog,
    CLogLog,
}

/// Links for the dispersion `σ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DispersionLink {
    Log,
    Sqrt,
    Identity,
}

fn check_unit(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(PlregError::Domain(format!("median link needs mu in (0, 1), got {mu}")))
    }
}

impl MedianLink {
    pub fn name(self) -> &'static str {
        match self {
            MedianLink::Logit => "logit",
            MedianLink::Probit => "probit",
            MedianLink::LogLog => "loglog",
            MedianLink::CLogLog => "cloglog",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "logit" => Some(MedianLink::Logit),
            "probit" => Some(MedianLink::Probit),
            "loglog" => Some(MedianLink::LogLog),
            "cloglog" => Some(MedianLink::CLogLog),
            _ => None,
        }
    }

    /// `η = d(μ)`.
    pub fn apply(self, mu: f64) -> Result<f64> {
        check_unit(mu)?;
        Ok(self.apply_unchecked(mu))
    }

    pub(crate) fn apply_unchecked(self, mu: f64) -> f64 {
        match self {
            MedianLink::Logit => (mu / (1.0 - mu)).ln(),
            MedianLink::Probit => norm_quantile(mu),
            MedianLink::LogLog => -(-mu.ln()).ln(),
            MedianLink::CLogLog => (-(-mu).ln_1p()).ln(),
        }
    }

    /// `μ = d^{-1}(η)`.
    pub fn inverse(self, eta: f64) -> f64 {
        match self {
            MedianLink::Logit => {
                if eta >= 0.0 {
                    1.0 / (1.0 + (-eta).exp())
                } else {
                    let e = eta.exp();
                    e / (1.0 + e)
                }
            }
            MedianLink::Probit => norm_cdf(eta),
            MedianLink::LogLog => (-(-eta).exp()).exp(),
            MedianLink::CLogLog => -(-(eta.exp())).exp_m1(),
        }
    }

    /// `d'(μ)`.
    pub fn d1(self, mu: f64) -> Result<f64> {
        check_unit(mu)?;
        Ok(self.derivatives(mu).0)
    }

    /// `d''(μ)`.
    pub fn d2(self, mu: f64) -> Result<f64> {
        check_unit(mu)?;
        Ok(self.derivatives(mu).1)
    }

    /// `(d'(μ), d''(μ))`.
    pub(crate) fn derivatives(self, mu: f64) -> (f64, f64) {
        match self {
            MedianLink::Logit => {
                let q = mu * (1.0 - mu);
                (1.0 / q, (2.0 * mu - 1.0) / (q * q))
            }
            MedianLink::Probit => {
                let eta = norm_quantile(mu);
                let phi = norm_pdf(eta);
                (1.0 / phi, eta / (phi * phi))
            }
            MedianLink::LogLog => {
                let l = mu.ln();
                let q = mu * l;
                (-1.0 / q, (1.0 + l) / (q * q))
            }
            MedianLink::CLogLog => {
                let nu = 1.0 - mu;
                let l = (-mu).ln_1p();
                let q = nu * l;
                (-1.0 / q, -(1.0 + l) / (q * q))
            }
        }
    }
}

impl DispersionLink {
    pub fn name(self) -> &'static str {
        match self {
            DispersionLink::Log => "log",
            DispersionLink::Sqrt => "sqrt",
            DispersionLink::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "log" => Some(DispersionLink::Log),
            "sqrt" => Some(DispersionLink::Sqrt),
            "identity" => Some(DispersionLink::Identity),
            _ => None,
        }
    }

    pub fn apply(self, sigma: f64) -> Result<f64> {
        if !(sigma > 0.0) {
            return Err(PlregError::Domain(format!("dispersion link needs sigma > 0, got {sigma}")));
        }
        Ok(match self {
            DispersionLink::Log => sigma.ln(),
            DispersionLink::Sqrt => sigma.sqrt(),
            DispersionLink::Identity => sigma,
        })
    }

    /// `σ = d^{-1}(η)`; `None` when `η` maps outside `σ > 0`.
    pub fn inverse(self, eta: f64) -> Option<f64> {
        let sigma = match self {
            DispersionLink::Log => eta.exp(),
            DispersionLink::Sqrt if eta > 0.0 => eta * eta,
            DispersionLink::Identity => eta,
            DispersionLink::Sqrt => return None,
        };
        (sigma > 0.0 && sigma.is_finite()).then_some(sigma)
    }

    /// `(d'(σ), d''(σ))`.
    pub(crate) fn derivatives(self, sigma: f64) -> (f64, f64) {
        match self {
            DispersionLink::Log => (1.0 / sigma, -1.0 / (sigma * sigma)),
            DispersionLink::Sqrt => {
                let s = sigma.sqrt();
                (0.5 / s, -0.25 / (sigma * s))
            }
            DispersionLink::Identity => (1.0, 0.0),
        }
    }

    pub fn d1(self, sigma: f64) -> f64 {
        self.derivatives(sigma).0
    }

    pub fn d2(self, sigma: f64) -> f64 {
        self.derivatives(sigma).1
    }
}
