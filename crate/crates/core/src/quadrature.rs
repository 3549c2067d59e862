//! Adaptive Gauss–Kronrod (7/15) quadrature with global error control.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

/// Result of a quadrature: value and estimated absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Quad {
    pub value: f64,
    pub abs_error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Quad {
    if a == b {
        return Quad {
            value: 0.0,
            abs_error: 0.0,
        };
    }
    if a > b {
        let q = integrate(f, b, a, opts);
        return Quad {
            value: -q.value,
            abs_error: q.abs_error,
        };
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut intervals = 1;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) && intervals < opts.max_intervals
    {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        intervals += 1;
    }
    // Re-sum to shed the accumulated rounding of the running totals.
    let (value, abs_error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Quad { value, abs_error }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> Quad {
    integrate(
        |t: f64| {
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Integrates `f` over the whole real line.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, opts: QuadOptions) -> Quad {
    let right = integrate_to_infinity(&f, 0.0, opts);
    let left = integrate_to_infinity(|x| f(-x), 0.0, opts);
    Quad {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x.powi(5) - 2.0 * x, -1.0, 2.0, QuadOptions::default());
        // x^6/6 - x^2 from -1 to 2
        let exact = (64.0 / 6.0 - 4.0) - (1.0 / 6.0 - 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits() {
        let q = integrate(|x| x.abs().powf(1.5), 0.0, -2.0, QuadOptions::default());
        assert!((q.value + 2f64.powf(2.5) / 2.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_over_real_line() {
        let q = integrate_real_line(|x| (-0.5 * x * x).exp(), QuadOptions::default());
        assert!((q.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let q = integrate(|x| x.powf(-0.5), 0.0, 1.0, QuadOptions::default());
        assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    }
}
