//! Expected values of standard normal order statistics.

use crate::quadrature::{integrate, QuadOptions};
use crate::special::{ln_gamma, norm_cdf, norm_pdf, norm_quantile, norm_sf};

/// Sample sizes up to this use quadrature; larger ones the Blom formula.
pub const EXACT_ORDER_STATS_MAX_N: usize = 200;

/// `E[Z_(i)]`, `i = 1..n`, for a standard normal sample of size `n`.
///
/// Exact quadrature of the order-statistic density for
/// `n <= EXACT_ORDER_STATS_MAX_N`; beyond that the Blom approximation
/// `Φ^{-1}((i - 3/8) / (n + 1/4))`, which is off by about 0.01 in the
/// extremes and much less in the bulk.
pub fn expected_normal_order_stats(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    if n > EXACT_ORDER_STATS_MAX_N {
        return blom(n);
    }
    let mut out = vec![0.0; n];
    let half = n / 2;
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    for k in 0..half {
        // the upper order statistic i = n - k; the lower mirrors it
        let i = n - k;
        let ln_c = ln_n_fact - ln_gamma(i as f64) - ln_gamma((n - i) as f64 + 1.0);
        let a = (i - 1) as f64;
        let b = (n - i) as f64;
        let density = |z: f64| {
            let lower = norm_cdf(z);
            let upper = norm_sf(z);
            if lower <= 0.0 || upper <= 0.0 {
                return 0.0;
            }
            let ln = ln_c + a * lower.ln() + if b > 0.0 { b * upper.ln() } else { 0.0 };
            z * norm_pdf(z) * ln.exp()
        };
        let value = integrate(density, -12.0, 0.0, opts).value + integrate(density, 0.0, 12.0, opts).value;
        out[i - 1] = value;
        out[k] = -value;
    }
    out
}

fn blom(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut out: Vec<f64> = (1..=n)
        .map(|i| norm_quantile((i as f64 - 0.375) / (nf + 0.25)))
        .collect();
    // enforce exact antisymmetry
    for k in 0..n / 2 {
        let v = 0.5 * (out[n - 1 - k] - out[k]);
        out[n - 1 - k] = v;
        out[k] = -v;
    }
    if n % 2 == 1 {
        out[n / 2] = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_samples() {
        let two = expected_normal_order_stats(2);
        assert!((two[1] - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-10);
        assert!((two[1] - 0.564_190).abs() < 1e-6);
        let three = expected_normal_order_stats(3);
        assert_eq!(three[1], 0.0);
        // E[Z_(3)] for n = 3 is 3 / (2 √π)
        assert!((three[2] - 1.5 / std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn symmetric_and_increasing() {
        for n in [1, 7, 40, 201] {
            let e = expected_normal_order_stats(n);
            assert!(e.iter().sum::<f64>().abs() < 1e-10);
            assert!(e.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn blom_is_close_at_the_switch() {
        let exact = expected_normal_order_stats(EXACT_ORDER_STATS_MAX_N);
        let approx = blom(EXACT_ORDER_STATS_MAX_N);
        let worst = exact.iter().zip(&approx).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst < 1.5e-2, "{worst}");
        let bulk = exact[20..180].iter().zip(&approx[20..180]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(bulk < 2e-3, "{bulk}");
    }
}
