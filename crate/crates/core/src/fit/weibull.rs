//! Weibull density and its two estimators.
//!
//! The density is `P(tau) = beta * alpha^-beta * tau^(beta-1) * exp(-(tau/alpha)^beta)`.
//! MLE solves the one-dimensional profile equation in the shape, then gets
//! the scale in closed form; NLSE minimizes log10-density residuals on a
//! binned empirical density by damped Gauss-Newton.

use statrs::function::gamma::gamma;

use crate::density::{empirical_density, residual_rms, DensityEstimate, DEFAULT_BINS_PER_DECADE};
use crate::error::{Error, Result};
use crate::fit::optim::{gauss_newton2, newton_bisect, MAX_ITER, STEP_TOL};
use crate::fit::{Estimator, FitFamily, FitParams, FitResult};

/// Scale `alpha > 0` and shape `beta > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullParams {
    alpha: f64,
    beta: f64,
}

impl WeibullParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid(format!(
                "Weibull parameters must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(WeibullParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Density at `tau`. Outside the support this returns the mathematical
    /// limit: 0 for negative `tau`, and at `tau = 0` the value diverges for
    /// `beta < 1`.
    pub fn pdf(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        if tau == 0.0 {
            return match self.beta {
                b if b < 1.0 => f64::INFINITY,
                b if b == 1.0 => 1.0 / self.alpha,
                _ => 0.0,
            };
        }
        let z = tau / self.alpha;
        self.beta / self.alpha * z.powf(self.beta - 1.0) * (-z.powf(self.beta)).exp()
    }

    /// `E[tau] = alpha * Gamma(1 + 1/beta)`.
    pub fn mean(&self) -> f64 {
        self.alpha * gamma(1.0 + 1.0 / self.beta)
    }

    /// Standard deviation of the distribution.
    pub fn std(&self) -> f64 {
        let g1 = gamma(1.0 + 1.0 / self.beta);
        let g2 = gamma(1.0 + 2.0 / self.beta);
        self.alpha * (g2 - g1 * g1).sqrt()
    }

    /// Inverse CDF: `alpha * (-ln(1-u))^(1/beta)` for `u` in [0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        self.alpha * (-(1.0 - u).ln()).powf(1.0 / self.beta)
    }

    /// CDF at `tau >= 0`.
    pub fn cdf(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            0.0
        } else {
            1.0 - (-(tau / self.alpha).powf(self.beta)).exp()
        }
    }
}

fn validate_positive_samples(samples: &[f64]) -> Result<()> {
    if samples.len() < 100 {
        return Err(Error::invalid(format!(
            "Weibull fitting needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::invalid("Weibull samples must be strictly positive and finite"));
    }
    Ok(())
}

/// Maximum-likelihood fit with the default 20-bins-per-decade residual
/// density.
pub fn fit_weibull_mle(samples: &[f64]) -> Result<FitResult> {
    fit_weibull_mle_with_bins(samples, DEFAULT_BINS_PER_DECADE)
}

/// Maximum-likelihood fit; `bins_per_decade` only affects the reported
/// residual r.m.s., not the estimate.
pub fn fit_weibull_mle_with_bins(samples: &[f64], bins_per_decade: usize) -> Result<FitResult> {
    validate_positive_samples(samples)?;
    let n = samples.len() as f64;
    let ln_t: Vec<f64> = samples.iter().map(|t| t.ln()).collect();
    let mean_ln: f64 = ln_t.iter().sum::<f64>() / n;

    // profile score g(beta) = 1/beta + mean(ln t) - S1/S0 with
    // S0 = sum(t^beta), S1 = sum(t^beta ln t); g is decreasing in beta.
    let sums = |beta: f64| -> (f64, f64, f64) {
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (&t, &lt) in samples.iter().zip(&ln_t) {
            let tb = t.powf(beta);
            s0 += tb;
            s1 += tb * lt;
            s2 += tb * lt * lt;
        }
        (s0, s1, s2)
    };
    let score = |beta: f64| -> (f64, f64) {
        let (s0, s1, s2) = sums(beta);
        let g = 1.0 / beta + mean_ln - s1 / s0;
        let dg = -1.0 / (beta * beta) - (s2 * s0 - s1 * s1) / (s0 * s0);
        (g, dg)
    };

    // verify a sign change before iterating; identical samples never change sign
    let mut lo = 1e-3;
    let mut hi = 2.0;
    let mut evals = 0usize;
    while score(hi).0 > 0.0 {
        evals += 1;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::DegenerateSeries(
                "Weibull profile score has no sign change; samples carry no spread".into(),
            ));
        }
    }
    while score(lo).0 < 0.0 {
        evals += 1;
        lo /= 10.0;
        if lo < 1e-8 {
            return Err(Error::Convergence {
                what: "Weibull MLE bracketing",
                iterations: evals,
                grad_norm: f64::NAN,
            });
        }
    }

    let (beta, iters, grad_norm) = newton_bisect(score, lo, hi, STEP_TOL, MAX_ITER);
    if iters >= MAX_ITER {
        return Err(Error::Convergence { what: "Weibull MLE", iterations: iters, grad_norm });
    }
    let (s0, _, _) = sums(beta);
    let alpha = (s0 / n).powf(1.0 / beta);
    let params = WeibullParams::new(alpha, beta)?;

    let density = empirical_density(samples, bins_per_decade)?;
    let chi = residual_rms(&density, |x| params.pdf(x))?;
    Ok(FitResult {
        family: FitFamily::Weibull,
        estimator: Estimator::Mle,
        params: FitParams::Weibull(params),
        chi,
        n: samples.len(),
        iterations: iters,
        grad_norm,
    })
}

/// Shape estimate matching the coefficient of variation implied by a binned
/// density; the scale follows from the mean. Used to seed NLSE.
fn moment_start(density: &DensityEstimate) -> (f64, f64) {
    let mut mass = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (c, &k) in density.centers().iter().zip(density.counts()) {
        let w = k as f64;
        mass += w;
        m1 += w * c;
        m2 += w * c * c;
    }
    let mean = m1 / mass;
    let var = (m2 / mass - mean * mean).max(1e-12);
    let cv2 = var / (mean * mean);
    // Gamma(1+2/b)/Gamma(1+1/b)^2 - 1 falls monotonically in b
    let cv2_of = |b: f64| {
        let g1 = gamma(1.0 + 1.0 / b);
        gamma(1.0 + 2.0 / b) / (g1 * g1) - 1.0
    };
    let mut lo = 0.05;
    let mut hi = 20.0;
    if cv2 >= cv2_of(lo) {
        return (mean / gamma(1.0 + 1.0 / lo), lo);
    }
    if cv2 <= cv2_of(hi) {
        return (mean / gamma(1.0 + 1.0 / hi), hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cv2_of(mid) > cv2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    (mean / gamma(1.0 + 1.0 / beta), beta)
}

/// Nonlinear least squares on log10 density over non-empty bins.
pub fn fit_weibull_nlse(density: &DensityEstimate) -> Result<FitResult> {
    let idx = density.non_empty_indices();
    if idx.len() < 10 {
        return Err(Error::invalid(format!(
            "Weibull NLSE needs at least 10 non-empty bins, got {}",
            idx.len()
        )));
    }
    let centers: Vec<f64> = idx.iter().map(|&i| density.centers()[i]).collect();
    let log_rho: Vec<f64> = idx.iter().map(|&i| density.density()[i].log10()).collect();
    let ln10 = std::f64::consts::LN_10;

    // parameters theta = (ln alpha, ln beta); residual r = log10 P - log10 rho
    let eval = move |theta: &[f64; 2]| -> Option<(Vec<f64>, Vec<[f64; 2]>)> {
        let alpha = theta[0].exp();
        let beta = theta[1].exp();
        if !alpha.is_finite() || !beta.is_finite() || beta > 1e3 {
            return None;
        }
        let mut res = Vec::with_capacity(centers.len());
        let mut jac = Vec::with_capacity(centers.len());
        for (&c, &lr) in centers.iter().zip(&log_rho) {
            let lz = (c / alpha).ln();
            let zb = (beta * lz).exp(); // (c/alpha)^beta
            if !zb.is_finite() {
                return None;
            }
            let ln_p = beta.ln() - beta * alpha.ln() + (beta - 1.0) * c.ln() - zb;
            res.push(ln_p / ln10 - lr);
            let d_ln_alpha = beta * (zb - 1.0);
            let d_ln_beta = 1.0 + beta * lz * (1.0 - zb);
            jac.push([d_ln_alpha / ln10, d_ln_beta / ln10]);
        }
        Some((res, jac))
    };

    let (a0, b0) = moment_start(density);
    let starts = [
        [a0.ln(), b0.ln()],
        [(a0 * 0.5).ln(), (b0 * 0.7).ln()],
        [(a0 * 2.0).ln(), (b0 * 1.4).ln()],
    ];
    let mut best: Option<crate::fit::optim::Optimum> = None;
    for s in starts {
        if let Some(out) = gauss_newton2(s, &eval) {
            if out.converged && best.as_ref().map_or(true, |b| out.value < b.value) {
                best = Some(out);
            }
        }
    }
    let best = best.ok_or(Error::Convergence {
        what: "Weibull NLSE",
        iterations: MAX_ITER,
        grad_norm: f64::NAN,
    })?;
    let params = WeibullParams::new(best.x[0].exp(), best.x[1].exp())?;
    Ok(FitResult {
        family: FitFamily::Weibull,
        estimator: Estimator::Nlse,
        params: FitParams::Weibull(params),
        chi: (best.value / idx.len() as f64).sqrt(),
        n: density.n_samples(),
        iterations: best.iterations,
        grad_norm: best.grad_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_poisson_durations, gen_weibull_iid};

    #[test]
    fn pdf_exponential_special_case() {
        let p = WeibullParams::new(2.0, 1.0).unwrap();
        let expect = (-1.0f64).exp() / 2.0;
        assert!((p.pdf(2.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn pdf_integrates_to_one() {
        // trapezoid quadrature oracle on a fine grid
        let p = WeibullParams::new(0.41, 0.67).unwrap();
        let mut total = 0.0;
        let n = 400_000;
        let hi: f64 = 60.0; // survival beyond is ~exp(-60/0.41)^0.67 ~ 1e-12
        let h = hi / n as f64;
        for i in 0..n {
            let a = i as f64 * h + 1e-12;
            let b = a + h;
            total += 0.5 * (p.pdf(a) + p.pdf(b)) * h;
        }
        assert!((total - 1.0).abs() < 1e-3, "integral {total}");
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(WeibullParams::new(0.0, 1.0).is_err());
        assert!(WeibullParams::new(1.0, -0.5).is_err());
        assert!(WeibullParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn mle_recovers_paper_regime_parameters() {
        let samples = gen_weibull_iid(0.41, 0.67, 100_000, 12345).unwrap();
        let fit = fit_weibull_mle(&samples).unwrap();
        let (alpha, beta) = fit.params.pair();
        assert!((alpha - 0.41).abs() < 0.01, "alpha {alpha}");
        assert!((beta - 0.67).abs() < 0.01, "beta {beta}");
        assert!(fit.chi >= 0.0);
    }

    #[test]
    fn mle_exponential_gives_unit_shape() {
        let samples = gen_poisson_durations(1.0, 100_000, 99).unwrap();
        let fit = fit_weibull_mle(&samples).unwrap();
        let (_, beta) = fit.params.pair();
        assert!((beta - 1.0).abs() < 0.01, "beta {beta}");
    }

    #[test]
    fn mle_scale_equivariance() {
        let samples = gen_weibull_iid(0.6, 0.8, 5_000, 7).unwrap();
        let scaled: Vec<f64> = samples.iter().map(|x| 3.0 * x).collect();
        let f1 = fit_weibull_mle(&samples).unwrap();
        let f2 = fit_weibull_mle(&scaled).unwrap();
        let (a1, b1) = f1.params.pair();
        let (a2, b2) = f2.params.pair();
        assert!((a2 - 3.0 * a1).abs() < 1e-6 * a1.max(1.0), "{a1} {a2}");
        assert!((b2 - b1).abs() < 1e-6, "{b1} {b2}");
    }

    #[test]
    fn mle_rejects_bad_input() {
        assert!(fit_weibull_mle(&[1.0; 50]).is_err());
        let mut s = gen_weibull_iid(1.0, 1.0, 200, 1).unwrap();
        s[3] = 0.0;
        assert!(fit_weibull_mle(&s).is_err());
        // identical samples: no sign change in the profile score
        assert!(matches!(
            fit_weibull_mle(&vec![2.5; 500]),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn nlse_recovers_from_sampled_density() {
        let samples = gen_weibull_iid(0.41, 0.67, 1_000_000, 2024).unwrap();
        let density = empirical_density(&samples, 20).unwrap();
        let fit = fit_weibull_nlse(&density).unwrap();
        let (alpha, beta) = fit.params.pair();
        assert!((alpha - 0.41).abs() < 0.03, "alpha {alpha}");
        assert!((beta - 0.67).abs() < 0.03, "beta {beta}");
    }

    #[test]
    fn nlse_exact_on_noise_free_density() {
        let truth = WeibullParams::new(0.7, 0.9).unwrap();
        let edges = crate::density::log_grid(1e-3, 20.0, 20).unwrap();
        let density = crate::density::DensityEstimate::from_model(&edges, |x| truth.pdf(x), 1000);
        let fit = fit_weibull_nlse(&density).unwrap();
        let (alpha, beta) = fit.params.pair();
        assert!((alpha - 0.7).abs() < 1e-6);
        assert!((beta - 0.9).abs() < 1e-6);
        assert!(fit.chi < 1e-8, "chi {}", fit.chi);
    }

    #[test]
    fn mle_and_nlse_disagree_on_tail_truncated_data() {
        // drop the top 5%: the likelihood keeps tracking the bulk while the
        // binned log-density fit bends to the sharpened tail
        let mut samples = gen_weibull_iid(0.41, 0.67, 200_000, 5150).unwrap();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        samples.truncate(190_000);
        let mle = fit_weibull_mle(&samples).unwrap();
        let density = empirical_density(&samples, 20).unwrap();
        let nlse = fit_weibull_nlse(&density).unwrap();
        let (_, b_mle) = mle.params.pair();
        let (_, b_nlse) = nlse.params.pair();
        assert!(
            (b_mle - b_nlse).abs() > 0.02,
            "estimators unexpectedly agree: MLE {b_mle} NLSE {b_nlse}"
        );
    }
}
