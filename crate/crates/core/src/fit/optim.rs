//! Small dense optimizers shared by the distribution fits: a safeguarded
//! 1-D Newton/bisection root finder, a damped Gauss-Newton least-squares
//! loop and a two-parameter BFGS minimizer with box clamping.

/// Parameter-change tolerance shared by all fitting loops.
pub(crate) const STEP_TOL: f64 = 1e-8;
/// Iteration cap shared by all fitting loops.
pub(crate) const MAX_ITER: usize = 200;

/// Root of a monotonically decreasing `f` on `[lo, hi]` with `f(lo) > 0 > f(hi)`.
/// Newton steps are taken when they stay inside the bracket, bisection
/// otherwise. Returns `(root, iterations, |f(root)|)`.
pub(crate) fn newton_bisect<F>(
    f_df: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, usize, f64)
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    let mut iterations = 0;
    let mut fx = 0.0;
    for iter in 1..=max_iter {
        iterations = iter;
        let (f, df) = f_df(x);
        fx = f;
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if df != 0.0 { x - f / df } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step < tol * x.abs().max(1.0) {
            break;
        }
    }
    (x, iterations, fx.abs())
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Optimum {
    pub x: [f64; 2],
    /// Objective value: SSR for least squares, negative mean log-likelihood for BFGS.
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

/// Damped Gauss-Newton on a two-parameter residual vector. `eval` returns
/// the residuals and their Jacobian rows at a parameter point, or `None`
/// when the point is outside the evaluable region.
pub(crate) fn gauss_newton2<F>(start: [f64; 2], eval: F) -> Option<Optimum>
where
    F: Fn(&[f64; 2]) -> Option<(Vec<f64>, Vec<[f64; 2]>)>,
{
    let ssr_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut x = start;
    let (mut res, mut jac) = eval(&x)?;
    if res.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut ssr = ssr_of(&res);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;

    for iter in 1..=MAX_ITER {
        iterations = iter;
        let mut a = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for (r, row) in res.iter().zip(&jac) {
            a[0][0] += row[0] * row[0];
            a[0][1] += row[0] * row[1];
            a[1][1] += row[1] * row[1];
            g[0] += row[0] * r;
            g[1] += row[1] * r;
        }
        a[1][0] = a[0][1];
        grad_norm = (g[0] * g[0] + g[1] * g[1]).sqrt();

        let mut accepted = false;
        let mut step_len = 0.0;
        for _ in 0..40 {
            let damped = [
                [a[0][0] * (1.0 + lambda), a[0][1]],
                [a[1][0], a[1][1] * (1.0 + lambda)],
            ];
            let Some(delta) = solve2(damped, [-g[0], -g[1]]) else {
                lambda *= 10.0;
                continue;
            };
            let candidate = [x[0] + delta[0], x[1] + delta[1]];
            if let Some((r2, j2)) = eval(&candidate) {
                let s2 = ssr_of(&r2);
                if s2.is_finite() && s2 <= ssr {
                    step_len = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt();
                    x = candidate;
                    res = r2;
                    jac = j2;
                    ssr = s2;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            // damping exhausted: we are at a (possibly flat) minimum
            converged = grad_norm < 1e-6;
            break;
        }
        if step_len < STEP_TOL * (1.0 + x[0].abs().max(x[1].abs())) {
            converged = true;
            break;
        }
    }
    Some(Optimum { x, value: ssr, grad_norm, iterations, converged })
}

/// Two-parameter BFGS minimizer with box clamping and Armijo backtracking.
/// `f_g` returns the objective and its gradient.
pub(crate) fn bfgs2<F>(start: [f64; 2], lo: [f64; 2], hi: [f64; 2], f_g: F) -> Optimum
where
    F: Fn(&[f64; 2]) -> (f64, [f64; 2]),
{
    let clamp = |x: [f64; 2]| [x[0].clamp(lo[0], hi[0]), x[1].clamp(lo[1], hi[1])];
    let mut x = clamp(start);
    let (mut fx, mut g) = f_g(&x);
    let mut h = [[1.0, 0.0], [0.0, 1.0]];
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=MAX_ITER {
        iterations = iter;
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if gn < 1e-10 {
            converged = true;
            break;
        }
        let mut d = [
            -(h[0][0] * g[0] + h[0][1] * g[1]),
            -(h[1][0] * g[0] + h[1][1] * g[1]),
        ];
        let mut slope = d[0] * g[0] + d[1] * g[1];
        if !(slope < 0.0) {
            h = [[1.0, 0.0], [0.0, 1.0]];
            d = [-g[0], -g[1]];
            slope = d[0] * g[0] + d[1] * g[1];
        }
        let mut t = 1.0;
        let mut next: Option<([f64; 2], f64, [f64; 2])> = None;
        for _ in 0..60 {
            let cand = clamp([x[0] + t * d[0], x[1] + t * d[1]]);
            let (fc, gc) = f_g(&cand);
            if fc.is_finite() && fc <= fx + 1e-4 * t * slope {
                next = Some((cand, fc, gc));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fn_, gn_)) = next else {
            converged = gn < 1e-6;
            break;
        };
        let s = [xn[0] - x[0], xn[1] - x[1]];
        let y = [gn_[0] - g[0], gn_[1] - g[1]];
        let sy = s[0] * y[0] + s[1] * y[1];
        let clamped = xn[0] == lo[0] || xn[0] == hi[0] || xn[1] == lo[1] || xn[1] == hi[1];
        if sy > 1e-12 && !clamped {
            // inverse BFGS update: H' = (I - r s y')H(I - r y s') + r s s'
            let r = 1.0 / sy;
            let hy = [
                h[0][0] * y[0] + h[0][1] * y[1],
                h[1][0] * y[0] + h[1][1] * y[1],
            ];
            let yhy = y[0] * hy[0] + y[1] * hy[1];
            let mut hn = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    hn[i][j] = h[i][j] - r * (s[i] * hy[j] + hy[i] * s[j])
                        + r * r * (sy + yhy) * s[i] * s[j];
                }
            }
            h = hn;
        } else {
            h = [[1.0, 0.0], [0.0, 1.0]];
        }
        let step_len = (s[0] * s[0] + s[1] * s[1]).sqrt();
        x = xn;
        fx = fn_;
        g = gn_;
        if step_len < STEP_TOL * (1.0 + x[0].abs().max(x[1].abs())) {
            converged = true;
            break;
        }
    }
    let grad_norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
    Optimum { x, value: fx, grad_norm, iterations, converged }
}
