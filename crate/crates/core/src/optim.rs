//! Unconstrained minimisation: BFGS with a strong-Wolfe line search, a
//! damped Newton refinement, and golden-section search on an interval.
//!
//! Objectives return `None` for infeasible points; the line searches treat
//! those as `+∞` and shrink the step.

use nalgebra::{DMatrix, DVector};

/// Objective value and gradient, or `None` outside the domain.
pub type Evaluation = Option<(f64, DVector<f64>)>;

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when `max |g| <= grad_tol`.
    pub grad_tol: f64,
    /// Stop when the relative decrease of `f` falls below this for two
    /// consecutive iterations.
    pub f_rel_tol: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-8,
            f_rel_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: DVector<f64>,
    pub f: f64,
    pub grad: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct LinePoint {
    alpha: f64,
    f: f64,
    dg: f64,
    grad: DVector<f64>,
}

/// Strong-Wolfe line search along `dir` (Nocedal & Wright, algorithms 3.5/3.6).
fn wolfe_search<F>(
    obj: &mut F,
    x: &DVector<f64>,
    f0: f64,
    dg0: f64,
    dir: &DVector<f64>,
    alpha_init: f64,
) -> Option<LinePoint>
where
    F: FnMut(&DVector<f64>) -> Evaluation,
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    let mut eval = |alpha: f64| -> Option<LinePoint> {
        let xt = x + dir * alpha;
        let (f, grad) = obj(&xt)?;
        if !f.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return None;
        }
        let dg = grad.dot(dir);
        Some(LinePoint { alpha, f, dg, grad })
    };

    let mut prev = LinePoint {
        alpha: 0.0,
        f: f0,
        dg: dg0,
        grad: DVector::zeros(0),
    };
    let mut alpha = alpha_init;
    let mut best: Option<LinePoint> = None;
    for i in 0..40 {
        let Some(cur) = eval(alpha) else {
            // infeasible: retreat towards the last good point
            alpha = prev.alpha + 0.25 * (alpha - prev.alpha);
            if alpha - prev.alpha < 1e-16 {
                break;
            }
            continue;
        };
        if cur.f > f0 + C1 * cur.alpha * dg0 || (i > 0 && cur.f >= prev.f) {
            return zoom(&mut eval, prev, cur, f0, dg0).or(best);
        }
        if cur.dg.abs() <= -C2 * dg0 {
            return Some(cur);
        }
        if cur.dg >= 0.0 {
            return zoom(&mut eval, cur, prev, f0, dg0).or(best);
        }
        let next = 2.0 * cur.alpha;
        if best.as_ref().is_none_or(|b| cur.f < b.f) {
            best = Some(LinePoint {
                alpha: cur.alpha,
                f: cur.f,
                dg: cur.dg,
                grad: cur.grad.clone(),
            });
        }
        prev = cur;
        alpha = next;
    }
    best
}

fn zoom<E>(eval: &mut E, mut lo: LinePoint, mut hi: LinePoint, f0: f64, dg0: f64) -> Option<LinePoint>
where
    E: FnMut(f64) -> Option<LinePoint>,
{
    const C1: f64 = 1e-4;
    const C2: f64 = 0.9;
    for _ in 0..60 {
        // quadratic interpolation from lo's value and slope, safeguarded
        let (a, b) = (lo.alpha, hi.alpha);
        let d = b - a;
        let denom = 2.0 * (hi.f - lo.f - lo.dg * d);
        let mut alpha = if denom > 0.0 { a - lo.dg * d * d / denom } else { a + 0.5 * d };
        let (left, right) = if a < b { (a, b) } else { (b, a) };
        let margin = 0.1 * (right - left);
        if !(alpha > left + margin && alpha < right - margin) {
            alpha = 0.5 * (a + b);
        }
        if (right - left).abs() < 1e-16 * right.abs().max(1e-300) {
            break;
        }
        let Some(cur) = eval(alpha) else {
            hi = LinePoint {
                alpha,
                f: f64::INFINITY,
                dg: 0.0,
                grad: DVector::zeros(0),
            };
            continue;
        };
        if cur.f > f0 + C1 * alpha * dg0 || cur.f >= lo.f {
            hi = cur;
        } else {
            if cur.dg.abs() <= -C2 * dg0 {
                return Some(cur);
            }
            if cur.dg * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
    }
    (lo.alpha > 0.0 && lo.f < f0).then_some(lo)
}

/// Minimises `obj` from `x0` by BFGS. `h0` is an optional initial inverse
/// Hessian approximation; the identity scaled by the first step is used
/// otherwise.
pub fn bfgs<F>(mut obj: F, x0: DVector<f64>, h0: Option<DMatrix<f64>>, opts: BfgsOptions) -> Option<Minimum>
where
    F: FnMut(&DVector<f64>) -> Evaluation,
{
    let n = x0.len();
    let (mut f, mut g) = obj(&x0)?;
    let mut x = x0;
    let have_h0 = h0.is_some();
    let mut h = h0.unwrap_or_else(|| DMatrix::identity(n, n));
    let mut small_steps = 0;
    let mut iterations = 0;
    let mut converged = max_abs(&g) <= opts.grad_tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let mut dir = -(&h * &g);
        let mut dg = dir.dot(&g);
        if !(dg < 0.0) {
            // lost descent: restart from steepest descent
            h = DMatrix::identity(n, n);
            dir = -g.clone();
            dg = dir.dot(&g);
        }
        let alpha_init = if iterations == 1 && !have_h0 {
            (1.0 / max_abs(&g)).min(1.0)
        } else {
            1.0
        };
        let Some(step) = wolfe_search(&mut obj, &x, f, dg, &dir, alpha_init) else {
            if h != DMatrix::identity(n, n) {
                h = DMatrix::identity(n, n);
                continue;
            }
            break;
        };
        let s = &dir * step.alpha;
        let yv = &step.grad - &g;
        let sy = s.dot(&yv);
        let f_old = f;
        x += &s;
        f = step.f;
        g = step.grad;
        if sy > 1e-12 * s.norm() * yv.norm() {
            if iterations == 1 && !have_h0 {
                h *= sy / yv.dot(&yv);
            }
            let rho = 1.0 / sy;
            let hy = &h * &yv;
            let yhy = yv.dot(&hy);
            // H+ = H - ρ(s hyᵀ + hy sᵀ) + (ρ² yᵀHy + ρ) s sᵀ
            h -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            h += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }
        if max_abs(&g) <= opts.grad_tol {
            converged = true;
        } else if (f_old - f).abs() <= opts.f_rel_tol * f.abs().max(1.0) {
            small_steps += 1;
            if small_steps >= 2 {
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    Some(Minimum {
        x,
        f,
        grad: g,
        iterations,
        converged,
    })
}

/// Damped Newton iterations for a minimum. `obj` returns the value, gradient
/// and Hessian. Stops when `max |g| <= grad_tol`, or when no step can lower
/// `f`, or when the Hessian is not positive definite.
pub fn newton<F>(mut obj: F, x0: DVector<f64>, grad_tol: f64, max_iter: usize) -> Option<Minimum>
where
    F: FnMut(&DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)>,
{
    let (mut f, mut g, mut hess) = obj(&x0)?;
    let mut x = x0;
    let mut iterations = 0;
    while max_abs(&g) > grad_tol && iterations < max_iter {
        iterations += 1;
        let Some(chol) = hess.clone().cholesky() else { break };
        let step = chol.solve(&(-&g));
        let decrease = -step.dot(&g);
        let tiny = 8.0 * f64::EPSILON * f.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let xt = &x + &step * t;
            if let Some((ft, gt, ht)) = obj(&xt) {
                // near the optimum f is flat to rounding; then the gradient decides
                let armijo = ft <= f - 1e-4 * t * decrease;
                let flat = ft <= f + tiny && max_abs(&gt) < max_abs(&g);
                if ft.is_finite() && (armijo || flat) {
                    x = xt;
                    f = ft;
                    g = gt;
                    hess = ht;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let converged = max_abs(&g) <= grad_tol;
    Some(Minimum {
        x,
        f,
        grad: g,
        iterations,
        converged,
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]` to relative
/// tolerance `rel_tol` in the abscissa. Returns `(x, f(x))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (c.abs() + d.abs()).max(1e-12) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &DVector<f64>) -> Evaluation {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = DVector::from_vec(vec![
            -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
            200.0 * (b - a * a),
        ]);
        Some((f, g))
    }

    #[test]
    fn bfgs_rosenbrock() {
        let m = bfgs(rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), None, BfgsOptions::default()).unwrap();
        assert!(m.converged, "{m:?}");
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn bfgs_respects_infeasible_region() {
        // minimise x - ln x on x > 0; f = None for x <= 0
        let obj = |x: &DVector<f64>| {
            let v = x[0];
            (v > 0.0).then(|| (v - v.ln(), DVector::from_vec(vec![1.0 - 1.0 / v])))
        };
        let m = bfgs(obj, DVector::from_vec(vec![5.0]), None, BfgsOptions::default()).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn newton_quadratic_one_step() {
        let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, -1.0]);
        let obj = |x: &DVector<f64>| {
            let g = &a * x - &b;
            Some((0.5 * x.dot(&(&a * x)) - b.dot(x), g, a.clone()))
        };
        let m = newton(obj, DVector::zeros(2), 1e-12, 10).unwrap();
        assert!(m.converged && m.iterations == 1);
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -2.0, 4.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }
}
