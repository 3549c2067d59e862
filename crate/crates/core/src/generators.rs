//! Symmetric density generators `S(0, 1; r)`.
//!
//! A generator `r(u)`, `u >= 0`, defines the standard symmetric density
//! `r(z²)` on the real line. Every generator provides the density, the
//! likelihood weight `v(z) = -2 r'(z²) / r(z²)` and its derivative, the cdf
//! `R`, the quantile function, an inverse-cdf sampler and the constants
//! `ξ_r = Var(Z)` and `d_r = E[Z² v(Z)²]`.
//!
//! Closed-form cdfs are used for the normal, Student-t, type II logistic,
//! power exponential (incomplete gamma), slash (incomplete gamma) and
//! sinh-normal laws. The type I logistic and hyperbolic cdfs are computed by
//! adaptive quadrature of `w ↦ r(w²)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PlregError, Result};
use crate::quadrature::{integrate, integrate_real_line, integrate_to_infinity, QuadOptions};
use crate::special::{
    bessel_k_scaled, hyperbolic_h1, ln_beta, ln_gamma, ln_scaled_lower_gamma, norm_quantile,
    norm_sf, regularized_upper_gamma_unchecked, scaled_lower_gamma_unchecked,
};

/// Normalizing constant of the type I logistic generator.
pub const LOGISTIC_I_CONSTANT: f64 = 1.484_300_029;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// The eight generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Normal,
    StudentT,
    LogisticI,
    LogisticII,
    PowerExponential,
    Slash,
    Hyperbolic,
    SinhNormal,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 8] = [
        GeneratorKind::Normal,
        GeneratorKind::StudentT,
        GeneratorKind::LogisticI,
        GeneratorKind::LogisticII,
        GeneratorKind::PowerExponential,
        GeneratorKind::Slash,
        GeneratorKind::Hyperbolic,
        GeneratorKind::SinhNormal,
    ];

    /// Whether the family carries the extra parameter ζ.
    pub fn has_zeta(self) -> bool {
        !matches!(
            self,
            GeneratorKind::Normal | GeneratorKind::LogisticI | GeneratorKind::LogisticII
        )
    }

    /// Identifier used on the command line and in artifacts.
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Normal => "normal",
            GeneratorKind::StudentT => "student_t",
            GeneratorKind::LogisticI => "logistic_i",
            GeneratorKind::LogisticII => "logistic_ii",
            GeneratorKind::PowerExponential => "power_exponential",
            GeneratorKind::Slash => "slash",
            GeneratorKind::Hyperbolic => "hyperbolic",
            GeneratorKind::SinhNormal => "sinh_normal",
        }
    }

    /// Short label used in model names (`PL-t`, `GJS-PE`, ...).
    pub fn label(self) -> &'static str {
        match self {
            GeneratorKind::Normal => "N",
            GeneratorKind::StudentT => "t",
            GeneratorKind::LogisticI => "LOI",
            GeneratorKind::LogisticII => "LOII",
            GeneratorKind::PowerExponential => "PE",
            GeneratorKind::Slash => "slash",
            GeneratorKind::Hyperbolic => "Hyp",
            GeneratorKind::SinhNormal => "SN",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let lower = name.to_ascii_lowercase().replace('-', "_");
        let kind = match lower.as_str() {
            "normal" | "n" => GeneratorKind::Normal,
            "student_t" | "t" | "student" => GeneratorKind::StudentT,
            "logistic_i" | "loi" => GeneratorKind::LogisticI,
            "logistic_ii" | "loii" => GeneratorKind::LogisticII,
            "power_exponential" | "pe" => GeneratorKind::PowerExponential,
            "slash" => GeneratorKind::Slash,
            "hyperbolic" | "hyp" => GeneratorKind::Hyperbolic,
            "sinh_normal" | "sn" => GeneratorKind::SinhNormal,
            _ => return None,
        };
        Some(kind)
    }

    /// Default ζ grid used by automatic ζ selection.
    pub fn default_zeta_grid(self) -> Vec<f64> {
        let steps = |start: f64, step: f64, end: f64| -> Vec<f64> {
            let count = ((end - start) / step).round() as usize;
            (0..=count)
                .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
                .collect()
        };
        match self {
            GeneratorKind::StudentT => vec![3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0, 100.0],
            GeneratorKind::PowerExponential => steps(0.6, 0.2, 3.0),
            GeneratorKind::Slash => steps(1.1, 0.3, 3.2),
            GeneratorKind::Hyperbolic => steps(0.5, 0.5, 6.0),
            GeneratorKind::SinhNormal => steps(0.3, 0.2, 2.1),
            _ => Vec::new(),
        }
    }
}

/// Weight function `v` and the derived quantities used by the score and
/// the Hessian, evaluated at one `z`.
#[derive(Debug, Clone, Copy)]
pub struct Weights {
    /// v(z)
    pub v: f64,
    /// v'(z)
    pub v_prime: f64,
    /// z v(z)
    pub zv: f64,
    /// d/dz [z v(z)] = v(z) + z v'(z)
    pub dzv: f64,
}

/// ξ_r, d_r and r(0) for a generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConstants {
    pub xi_r: f64,
    pub d_r: f64,
    pub r_at_zero: f64,
}

/// A density generator with its extra parameter, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    kind: GeneratorKind,
    zeta: Option<f64>,
    log_norm: f64,
    // power exponential: 2 p(ζ)^ζ; slash: ζ + 1/2
    aux: f64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, zeta: Option<f64>) -> Result<Self> {
        let zeta = match (kind.has_zeta(), zeta) {
            (true, Some(z)) if z > 0.0 && z.is_finite() => Some(z),
            (true, Some(z)) => return Err(PlregError::param("zeta", z, "zeta > 0")),
            (true, None) => {
                return Err(PlregError::Usage(format!(
                    "generator `{}` needs an extra parameter zeta",
                    kind.name()
                )))
            }
            (false, Some(z)) => {
                return Err(PlregError::Usage(format!(
                    "generator `{}` takes no extra parameter (got zeta = {z})",
                    kind.name()
                )))
            }
            (false, None) => None,
        };
        let z = zeta.unwrap_or(f64::NAN);
        let (log_norm, aux) = match kind {
            GeneratorKind::Normal => (-LN_SQRT_2PI, 0.0),
            GeneratorKind::StudentT => (0.5 * z * z.ln() - ln_beta(0.5, 0.5 * z), 0.0),
            GeneratorKind::LogisticI => (LOGISTIC_I_CONSTANT.ln(), 0.0),
            GeneratorKind::LogisticII => (0.0, 0.0),
            GeneratorKind::PowerExponential => {
                let ln_p = 0.5 * (-2.0 / z * 2f64.ln() + ln_gamma(1.0 / z) - ln_gamma(3.0 / z));
                let log_norm = z.ln() - ln_p - (1.0 + 1.0 / z) * 2f64.ln() - ln_gamma(1.0 / z);
                (log_norm, 2.0 * (z * ln_p).exp())
            }
            GeneratorKind::Slash => (z.ln() - LN_SQRT_2PI, z + 0.5),
            GeneratorKind::Hyperbolic => {
                let k1_scaled = bessel_k_scaled(1.0, z)?;
                // ln(1 / (2 K_1(ζ))) with K_1 = e^{-ζ} K_1^scaled
                (-(2f64.ln()) - k1_scaled.ln() + z, 0.0)
            }
            GeneratorKind::SinhNormal => (2f64.ln() - z.ln() - LN_SQRT_2PI, 0.0),
        };
        Ok(Self {
            kind,
            zeta,
            log_norm,
            aux,
        })
    }

    pub fn normal() -> Self {
        Self::new(GeneratorKind::Normal, None).expect("normal generator")
    }
    pub fn student_t(zeta: f64) -> Result<Self> {
        Self::new(GeneratorKind::StudentT, Some(zeta))
    }
    pub fn logistic_i() -> Self {
        Self::new(GeneratorKind::LogisticI, None).expect("logistic I generator")
    }
    pub fn logistic_ii() -> Self {
        Self::new(GeneratorKind::LogisticII, None).expect("logistic II generator")
    }
    pub fn power_exponential(zeta: f64) -> Result<Self> {
        Self::new(GeneratorKind::PowerExponential, Some(zeta))
    }
    pub fn slash(zeta: f64) -> Result<Self> {
        Self::new(GeneratorKind::Slash, Some(zeta))
    }
    pub fn hyperbolic(zeta: f64) -> Result<Self> {
        Self::new(GeneratorKind::Hyperbolic, Some(zeta))
    }
    pub fn sinh_normal(zeta: f64) -> Result<Self> {
        Self::new(GeneratorKind::SinhNormal, Some(zeta))
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn zeta(&self) -> Option<f64> {
        self.zeta
    }

    /// Same family with a different ζ.
    pub fn with_zeta(&self, zeta: f64) -> Result<Self> {
        Self::new(self.kind, Some(zeta))
    }

    /// `t(5)`, `PE(1.5)`, `N`, ...
    pub fn label(&self) -> String {
        match self.zeta {
            Some(z) => format!("{}({})", self.kind.label(), z),
            None => self.kind.label().to_string(),
        }
    }

    fn z(&self) -> f64 {
        self.zeta.unwrap_or(f64::NAN)
    }

    /// `ln r(u)` for `u >= 0`.
    pub fn log_r(&self, u: f64) -> f64 {
        let zeta = self.z();
        match self.kind {
            GeneratorKind::Normal => self.log_norm - 0.5 * u,
            GeneratorKind::StudentT => self.log_norm - 0.5 * (zeta + 1.0) * (zeta + u).ln(),
            GeneratorKind::LogisticI => self.log_norm - u - 2.0 * (-u).exp().ln_1p(),
            GeneratorKind::LogisticII => {
                let s = u.sqrt();
                -s - 2.0 * (-s).exp().ln_1p()
            }
            GeneratorKind::PowerExponential => self.log_norm - u.powf(0.5 * zeta) / self.aux,
            GeneratorKind::Slash => self.log_norm + ln_scaled_lower_gamma(self.aux, 0.5 * u),
            GeneratorKind::Hyperbolic => self.log_norm - zeta * (1.0 + u).sqrt(),
            GeneratorKind::SinhNormal => {
                let s = u.sqrt();
                let sh = s.sinh();
                // ln cosh s = s + ln(1 + e^{-2s}) - ln 2
                self.log_norm + s + (-2.0 * s).exp().ln_1p() - 2f64.ln() - 2.0 * sh * sh / (zeta * zeta)
            }
        }
    }

    /// Density generator `r(u)`, `u >= 0`.
    pub fn r(&self, u: f64) -> f64 {
        self.log_r(u).exp()
    }

    /// Standard symmetric density `r(z²)`.
    pub fn density(&self, z: f64) -> f64 {
        self.r(z * z)
    }

    /// `v(z)`, `v'(z)`, `z v(z)` and `v(z) + z v'(z)`.
    pub fn weights(&self, z: f64) -> Weights {
        let zeta = self.z();
        match self.kind {
            GeneratorKind::Normal => Weights {
                v: 1.0,
                v_prime: 0.0,
                zv: z,
                dzv: 1.0,
            },
            GeneratorKind::StudentT => {
                let den = zeta + z * z;
                let v = (zeta + 1.0) / den;
                Weights {
                    v,
                    v_prime: -2.0 * z * (zeta + 1.0) / (den * den),
                    zv: z * v,
                    dzv: (zeta + 1.0) * (zeta - z * z) / (den * den),
                }
            }
            GeneratorKind::LogisticI => {
                let half = 0.5 * z * z;
                let th = half.tanh();
                let sech2 = 1.0 - th * th;
                let v = 2.0 * th;
                let v_prime = 2.0 * z * sech2;
                Weights {
                    v,
                    v_prime,
                    zv: z * v,
                    dzv: v + z * v_prime,
                }
            }
            GeneratorKind::LogisticII => {
                let th = (0.5 * z).tanh();
                let dzv = 0.5 * (1.0 - th * th);
                let (v, v_prime) = if z.abs() < 1e-2 {
                    let z2 = z * z;
                    (
                        0.5 - z2 / 24.0 + z2 * z2 / 240.0 - 17.0 * z2 * z2 * z2 / 40_320.0,
                        -z / 12.0 + z * z2 / 60.0 - 102.0 * z * z2 * z2 / 40_320.0,
                    )
                } else {
                    let v = th / z;
                    (v, (dzv - v) / z)
                };
                Weights {
                    v,
                    v_prime,
                    zv: th,
                    dzv,
                }
            }
            GeneratorKind::PowerExponential => {
                let az = z.abs().max(1e-200);
                let sign = if z < 0.0 { -1.0 } else { 1.0 };
                let base = zeta * az.powf(zeta - 2.0) / self.aux;
                Weights {
                    v: base,
                    v_prime: (zeta - 2.0) * base * sign / az,
                    zv: sign * az * base,
                    dzv: (zeta - 1.0) * base,
                }
            }
            GeneratorKind::Slash => {
                let x = 0.5 * z * z;
                let a = self.aux;
                let s0 = scaled_lower_gamma_unchecked(a, x);
                let s1 = scaled_lower_gamma_unchecked(a + 1.0, x);
                let s2 = scaled_lower_gamma_unchecked(a + 2.0, x);
                let v = s1 / s0;
                let v_prime = z * (s1 * s1 - s0 * s2) / (s0 * s0);
                Weights {
                    v,
                    v_prime,
                    zv: z * v,
                    dzv: v + z * v_prime,
                }
            }
            GeneratorKind::Hyperbolic => {
                let q = 1.0 + z * z;
                let v = zeta / q.sqrt();
                Weights {
                    v,
                    v_prime: -zeta * z / (q * q.sqrt()),
                    zv: z * v,
                    dzv: zeta / (q * q.sqrt()),
                }
            }
            GeneratorKind::SinhNormal => {
                let z2inv = 1.0 / (zeta * zeta);
                if z.abs() < 1e-3 {
                    let c0 = 4.0 * z2inv - 1.0;
                    let c2 = 8.0 / 3.0 * z2inv + 1.0 / 3.0;
                    let c4 = 4.0 / 15.0 * z2inv - 2.0 / 15.0;
                    let z2 = z * z;
                    let v = c0 + c2 * z2 + c4 * z2 * z2;
                    Weights {
                        v,
                        v_prime: 2.0 * c2 * z + 4.0 * c4 * z * z2,
                        zv: z * v,
                        dzv: c0 + 3.0 * c2 * z2 + 5.0 * c4 * z2 * z2,
                    }
                } else {
                    let th = z.tanh();
                    let f = 2.0 * (2.0 * z).sinh() * z2inv - th;
                    let df = 4.0 * (2.0 * z).cosh() * z2inv - (1.0 - th * th);
                    let v = f / z;
                    Weights {
                        v,
                        v_prime: (df - v) / z,
                        zv: f,
                        dzv: df,
                    }
                }
            }
        }
    }

    /// Likelihood weight `v(z) = -2 r'(z²) / r(z²)`.
    pub fn v(&self, z: f64) -> f64 {
        self.weights(z).v
    }

    /// Derivative of [`v`](Self::v) with respect to `z`.
    pub fn v_prime(&self, z: f64) -> f64 {
        self.weights(z).v_prime
    }

    /// Upper tail `P(Z > w)` for `w >= 0`.
    fn upper_tail(&self, w: f64) -> f64 {
        debug_assert!(w >= 0.0);
        if w == 0.0 {
            return 0.5;
        }
        let zeta = self.z();
        match self.kind {
            GeneratorKind::Normal => norm_sf(w),
            GeneratorKind::StudentT => {
                0.5 * statrs::function::beta::beta_reg(0.5 * zeta, 0.5, zeta / (zeta + w * w))
            }
            GeneratorKind::LogisticII => 1.0 / (1.0 + w.exp()),
            GeneratorKind::PowerExponential => {
                0.5 * regularized_upper_gamma_unchecked(1.0 / zeta, w.powf(zeta) / self.aux)
            }
            GeneratorKind::Slash => {
                norm_sf(w)
                    + w * scaled_lower_gamma_unchecked(self.aux, 0.5 * w * w)
                        / (2.0 * (2.0 * PI).sqrt())
            }
            GeneratorKind::SinhNormal => norm_sf(2.0 * w.sinh() / zeta),
            GeneratorKind::LogisticI | GeneratorKind::Hyperbolic => self.upper_tail_quadrature(w),
        }
    }

    fn upper_tail_quadrature(&self, w: f64) -> f64 {
        let opts = QuadOptions {
            abs_tol: 1e-300,
            rel_tol: 1e-14,
            max_intervals: 2000,
        };
        if w < 1.5 {
            0.5 - integrate(|t| self.density(t), 0.0, w, opts).value
        } else {
            integrate_to_infinity(|t| self.density(t), w, opts).value
        }
    }

    /// Cumulative distribution function `R(z)`.
    pub fn cdf(&self, z: f64) -> f64 {
        if z > 0.0 {
            1.0 - self.upper_tail(z)
        } else {
            self.upper_tail(-z)
        }
    }

    /// Survival function `1 - R(z)`, accurate in the right tail.
    pub fn sf(&self, z: f64) -> f64 {
        if z >= 0.0 {
            self.upper_tail(z)
        } else {
            1.0 - self.upper_tail(-z)
        }
    }

    /// `Φ^{-1}[R(z)]`, computed from the smaller tail.
    pub fn normal_score(&self, z: f64) -> f64 {
        match self.kind {
            GeneratorKind::Normal => z,
            _ if z > 0.0 => -norm_quantile(self.upper_tail(z)),
            _ if z < 0.0 => norm_quantile(self.upper_tail(-z)),
            _ => 0.0,
        }
    }

    /// Quantile `R^{-1}(u)` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(PlregError::Domain(format!("quantile needs u in (0, 1), got {u}")));
        }
        if u == 0.5 {
            return Ok(0.0);
        }
        let zeta = self.z();
        let z = match self.kind {
            GeneratorKind::Normal => norm_quantile(u),
            GeneratorKind::LogisticII => (u / (1.0 - u)).ln(),
            GeneratorKind::SinhNormal => (0.5 * zeta * norm_quantile(u)).asinh(),
            _ => {
                let (tail, sign) = if u < 0.5 { (u, -1.0) } else { (1.0 - u, 1.0) };
                sign * self.invert_upper_tail(tail)
            }
        };
        Ok(z)
    }

    /// Solves `P(Z > w) = p`, `p ∈ (0, 1/2)`, by safeguarded Newton steps
    /// inside a bisection bracket.
    fn invert_upper_tail(&self, p: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.upper_tail(hi) > p {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return hi;
            }
        }
        let mut w = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.upper_tail(w) - p;
            if f > 0.0 {
                lo = w;
            } else {
                hi = w;
            }
            let slope = -self.density(w);
            let newton = w - f / slope;
            let next = if slope < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let step = (next - w).abs();
            w = next;
            if step <= 1e-13 * w.max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
                break;
            }
        }
        w
    }

    /// `n` i.i.d. draws by inversion, deterministic in `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    /// Draws `n` values with a caller-supplied generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u = open_unit(rng);
                self.quantile(u).expect("u in (0, 1)")
            })
            .collect()
    }

    /// ξ_r = Var(Z) and d_r = E[Z² v²(Z)].
    ///
    /// Exact closed forms where they exist. The slash d_r and sinh-normal
    /// ξ_r have only rough printed approximations (see
    /// [`tabulated_constants`](Self::tabulated_constants)); they are computed
    /// here by quadrature.
    pub fn constants(&self) -> Result<GeneratorConstants> {
        let zeta = self.z();
        let r_at_zero = self.r(0.0);
        let (xi_r, d_r) = match self.kind {
            GeneratorKind::Normal => (1.0, 1.0),
            GeneratorKind::StudentT => {
                if zeta <= 2.0 {
                    return Err(PlregError::param("zeta", zeta, "zeta > 2 for the Student-t xi_r"));
                }
                (zeta / (zeta - 2.0), (zeta + 1.0) / (zeta + 3.0))
            }
            GeneratorKind::LogisticI => (0.79569, 1.47724),
            GeneratorKind::LogisticII => (PI * PI / 3.0, 1.0 / 3.0),
            GeneratorKind::PowerExponential => (1.0, self.power_exponential_d_r()?),
            GeneratorKind::Slash => (self.slash_xi_r()?, self.moment_by_quadrature(|z, w| z * z * w.v * w.v)),
            GeneratorKind::Hyperbolic => self.hyperbolic_constants()?,
            GeneratorKind::SinhNormal => (
                self.moment_by_quadrature(|z, _| z * z),
                self.sinh_normal_d_r(),
            ),
        };
        Ok(GeneratorConstants {
            xi_r,
            d_r,
            r_at_zero,
        })
    }

    /// The printed closed forms and approximations, including `q(ζ)` for the
    /// sinh-normal ξ_r and the rational slash d_r approximation.
    pub fn tabulated_constants(&self) -> Result<GeneratorConstants> {
        let exact = self.constants()?;
        let zeta = self.z();
        Ok(match self.kind {
            GeneratorKind::Slash => GeneratorConstants {
                d_r: 4.0 * zeta * (zeta + 0.5) * ((zeta + 1.5) * (zeta + 2.5) + zeta + 1.0)
                    / ((zeta + 1.0) * (zeta + 1.5).powi(2) * (zeta + 2.5)),
                ..exact
            },
            GeneratorKind::SinhNormal => {
                let xi_r = if zeta < 2.0 {
                    (zeta * zeta / 4.0) * (1.0 - zeta * zeta / 4.0)
                } else {
                    let l = (zeta * 2f64.sqrt()).ln();
                    2.197_543_451 - 1.963_510_026 * l + l * l
                };
                GeneratorConstants { xi_r, ..exact }
            }
            _ => exact,
        })
    }

    fn power_exponential_d_r(&self) -> Result<f64> {
        let zeta = self.z();
        if zeta <= 0.5 {
            return Err(PlregError::param("zeta", zeta, "zeta > 1/2 for the power exponential d_r"));
        }
        Ok((2.0 * zeta.ln() - 2.0 * ln_gamma(1.0 / zeta)
            + ln_gamma(3.0 / zeta)
            + ln_gamma((2.0 * zeta - 1.0) / zeta))
            .exp())
    }

    fn slash_xi_r(&self) -> Result<f64> {
        let zeta = self.z();
        if zeta <= 1.0 {
            return Err(PlregError::param("zeta", zeta, "zeta > 1 for the slash xi_r"));
        }
        Ok(zeta / (zeta - 1.0))
    }

    fn hyperbolic_constants(&self) -> Result<(f64, f64)> {
        let zeta = self.z();
        let k1 = bessel_k_scaled(1.0, zeta)?;
        let k2 = bessel_k_scaled(2.0, zeta)?;
        // h1 / K1 with both carrying the factor e^{-ζ}
        let h1_scaled = hyperbolic_h1(zeta)? * zeta.exp();
        Ok((k2 / (zeta * k1), zeta * zeta * h1_scaled / k1))
    }

    fn sinh_normal_d_r(&self) -> f64 {
        let zeta = self.z();
        let x = 2f64.sqrt() / zeta;
        2.0 + 4.0 / (zeta * zeta)
            - (2.0 * PI).sqrt() / zeta * crate::special::erfc(x) * (2.0 / (zeta * zeta)).exp()
    }

    /// `∫ g(z, weights(z)) r(z²) dz` over the real line.
    fn moment_by_quadrature<G: Fn(f64, Weights) -> f64>(&self, g: G) -> f64 {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-12,
            max_intervals: 4000,
        };
        integrate_real_line(
            |z| {
                let d = self.density(z);
                if d == 0.0 {
                    0.0
                } else {
                    g(z, self.weights(z)) * d
                }
            },
            opts,
        )
        .value
    }
}

/// Uniform draw on the open interval (0, 1).
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
