//! Tsallis q-exponential density and its two estimators.
//!
//! The density is `P(tau) = (1/mu) * [1 + (1-q)(-tau/mu)]^(q/(1-q))` with
//! scale `mu > 0` and index `q > 1`; it reduces to the plain exponential as
//! `q -> 1` and its tail is a power law of exponent `q/(1-q)`.

use crate::density::{empirical_density, residual_rms, DensityEstimate, DEFAULT_BINS_PER_DECADE};
use crate::error::{Error, Result};
use crate::fit::optim::{bfgs2, gauss_newton2, Optimum, MAX_ITER};
use crate::fit::{Estimator, FitFamily, FitParams, FitResult};

/// Smallest admissible `q - 1`; at this distance the density is numerically
/// indistinguishable from the exponential.
const Q_MINUS_ONE_MIN: f64 = 1e-8;
const Q_MINUS_ONE_MAX: f64 = 50.0;

/// Scale `mu > 0` and Tsallis index `q > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QExpParams {
    mu: f64,
    q: f64,
}

impl QExpParams {
    pub fn new(mu: f64, q: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() || !(q > 1.0) || !q.is_finite() {
            return Err(Error::invalid(format!(
                "q-exponential needs mu > 0 and q > 1, got mu={mu}, q={q}"
            )));
        }
        Ok(QExpParams { mu, q })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Density at `tau >= 0`; 0 outside the support. `pdf(0) = 1/mu`.
    pub fn pdf(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        let w = 1.0 + (self.q - 1.0) * tau / self.mu;
        w.powf(self.q / (1.0 - self.q)) / self.mu
    }

    /// CDF at `tau >= 0`: `1 - [1 + (q-1) tau/mu]^(1/(1-q))`.
    pub fn cdf(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        let w = 1.0 + (self.q - 1.0) * tau / self.mu;
        1.0 - w.powf(1.0 / (1.0 - self.q))
    }

    /// Inverse CDF: `mu * ((1-u)^(1-q) - 1) / (q-1)` for `u` in [0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        self.mu * ((1.0 - u).powf(1.0 - self.q) - 1.0) / (self.q - 1.0)
    }

    /// Mean `mu / (2-q)`, finite only for `q < 2`.
    pub fn mean(&self) -> f64 {
        if self.q < 2.0 {
            self.mu / (2.0 - self.q)
        } else {
            f64::INFINITY
        }
    }
}

/// Maximum-likelihood fit with the default residual binning.
pub fn fit_qexp_mle(samples: &[f64]) -> Result<FitResult> {
    fit_qexp_mle_with_bins(samples, DEFAULT_BINS_PER_DECADE)
}

/// Two-parameter quasi-Newton ascent of the q-exponential log-likelihood in
/// `(ln mu, ln(q-1))`, from `(mu = sample mean, q = 1.5)` plus four
/// perturbed starts. Zeros are legal sample values (`pdf(0) = 1/mu`); they
/// stay in the likelihood but are left out of the residual density.
pub fn fit_qexp_mle_with_bins(samples: &[f64], bins_per_decade: usize) -> Result<FitResult> {
    if samples.len() < 100 {
        return Err(Error::invalid(format!(
            "q-exponential fitting needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::invalid("q-exponential samples must be non-negative and finite"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(Error::DegenerateSeries("all q-exponential samples are zero".into()));
    }

    // negative mean log-likelihood and gradient in theta = (ln mu, ln(q-1));
    // with w = 1 + (q-1) tau/mu and e = q/(1-q):
    //   l/n   = -ln mu + e * mean(ln w)
    //   dl/d theta1 = -1 - e * mean(1 - 1/w)
    //   dl/d theta2 = mean(ln w)/(q-1) + e * mean(1 - 1/w)
    let objective = |theta: &[f64; 2]| -> (f64, [f64; 2]) {
        let mu = theta[0].exp();
        let qm1 = theta[1].exp();
        let e = -(1.0 + qm1) / qm1; // q/(1-q)
        let mut mean_ln_w = 0.0;
        let mut mean_frac = 0.0; // mean(1 - 1/w)
        for &t in samples {
            let w = 1.0 + qm1 * t / mu;
            mean_ln_w += w.ln();
            mean_frac += 1.0 - 1.0 / w;
        }
        mean_ln_w /= n;
        mean_frac /= n;
        let ll = -mu.ln() + e * mean_ln_w;
        let d1 = -1.0 - e * mean_frac;
        let d2 = mean_ln_w / qm1 + e * mean_frac;
        (-ll, [-d1, -d2])
    };

    let starts = [
        (mean, 1.5),
        (mean * 0.5, 1.25),
        (mean * 2.0, 1.75),
        (mean * 0.25, 1.9),
        (mean, 1.1),
    ];
    let lo = [(mean * 1e-6).ln(), Q_MINUS_ONE_MIN.ln()];
    let hi = [(mean * 1e6).ln(), Q_MINUS_ONE_MAX.ln()];
    let mut best: Option<Optimum> = None;
    for (mu0, q0) in starts {
        let out = bfgs2([mu0.ln(), (q0 - 1.0f64).ln()], lo, hi, objective);
        if out.converged && best.as_ref().map_or(true, |b| out.value < b.value) {
            best = Some(out);
        }
    }
    let best = best.ok_or(Error::Convergence {
        what: "q-exponential MLE",
        iterations: MAX_ITER,
        grad_norm: f64::NAN,
    })?;
    let params = QExpParams::new(best.x[0].exp(), 1.0 + best.x[1].exp())?;

    let positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
    let density = empirical_density(&positive, bins_per_decade)?;
    let chi = residual_rms(&density, |x| params.pdf(x))?;
    Ok(FitResult {
        family: FitFamily::QExp,
        estimator: Estimator::Mle,
        params: FitParams::QExp(params),
        chi,
        n: samples.len(),
        iterations: best.iterations,
        grad_norm: best.grad_norm,
    })
}

/// Nonlinear least squares on log10 density over non-empty bins.
pub fn fit_qexp_nlse(density: &DensityEstimate) -> Result<FitResult> {
    let idx = density.non_empty_indices();
    if idx.len() < 10 {
        return Err(Error::invalid(format!(
            "q-exponential NLSE needs at least 10 non-empty bins, got {}",
            idx.len()
        )));
    }
    let centers: Vec<f64> = idx.iter().map(|&i| density.centers()[i]).collect();
    let log_rho: Vec<f64> = idx.iter().map(|&i| density.density()[i].log10()).collect();
    let ln10 = std::f64::consts::LN_10;

    let eval = move |theta: &[f64; 2]| -> Option<(Vec<f64>, Vec<[f64; 2]>)> {
        let mu = theta[0].exp();
        let qm1 = theta[1].exp();
        if !mu.is_finite() || !qm1.is_finite() || qm1 < Q_MINUS_ONE_MIN || qm1 > Q_MINUS_ONE_MAX {
            return None;
        }
        let e = -(1.0 + qm1) / qm1;
        let mut res = Vec::with_capacity(centers.len());
        let mut jac = Vec::with_capacity(centers.len());
        for (&c, &lr) in centers.iter().zip(&log_rho) {
            let w = 1.0 + qm1 * c / mu;
            let ln_p = -mu.ln() + e * w.ln();
            res.push(ln_p / ln10 - lr);
            let frac = 1.0 - 1.0 / w;
            let d1 = -1.0 - e * frac;
            let d2 = w.ln() / qm1 + e * frac;
            jac.push([d1 / ln10, d2 / ln10]);
        }
        Some((res, jac))
    };

    let mean = density.weighted_mean();
    let starts = [
        (mean, 1.5),
        (mean * 0.5, 1.25),
        (mean * 2.0, 1.75),
        (mean * 0.25, 1.9),
        (mean, 1.1),
    ];
    let mut best: Option<Optimum> = None;
    for (mu0, q0) in starts {
        if let Some(out) = gauss_newton2([mu0.ln(), (q0 - 1.0f64).ln()], &eval) {
            if out.converged && best.as_ref().map_or(true, |b| out.value < b.value) {
                best = Some(out);
            }
        }
    }
    let best = best.ok_or(Error::Convergence {
        what: "q-exponential NLSE",
        iterations: MAX_ITER,
        grad_norm: f64::NAN,
    })?;
    let params = QExpParams::new(best.x[0].exp(), 1.0 + best.x[1].exp())?;
    Ok(FitResult {
        family: FitFamily::QExp,
        estimator: Estimator::Nlse,
        params: FitParams::QExp(params),
        chi: (best.value / idx.len() as f64).sqrt(),
        n: density.n_samples(),
        iterations: best.iterations,
        grad_norm: best.grad_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_poisson_durations, gen_qexp_iid};

    #[test]
    fn pdf_at_zero_is_inverse_mu() {
        let p = QExpParams::new(0.24, 1.67).unwrap();
        assert!((p.pdf(0.0) - 1.0 / 0.24).abs() < 1e-12);
    }

    #[test]
    fn pdf_integrates_to_one_paper_point() {
        // adaptive-step trapezoid quadrature oracle at (mu, q) from the
        // fitted regime; power-law tail handled on a log grid
        let p = QExpParams::new(0.24, 1.67).unwrap();
        let mut total = 0.0;
        // linear panel on [0, 1]
        let n1 = 200_000;
        let h = 1.0 / n1 as f64;
        for i in 0..n1 {
            let a = i as f64 * h;
            total += 0.5 * (p.pdf(a) + p.pdf(a + h)) * h;
        }
        // geometric panels on [1, 1e12]
        let mut a = 1.0f64;
        let ratio = 1.0001f64;
        while a < 1e12 {
            let b = a * ratio;
            total += 0.5 * (p.pdf(a) + p.pdf(b)) * (b - a);
            a = b;
        }
        assert!((total - 1.0).abs() < 1e-6, "integral {total}");
    }

    #[test]
    fn cdf_quantile_round_trip() {
        let p = QExpParams::new(0.24, 1.67).unwrap();
        for &u in &[0.01, 0.3, 0.5, 0.9, 0.999] {
            let tau = p.quantile(u);
            assert!((p.cdf(tau) - u).abs() < 1e-10, "u {u}");
        }
    }

    #[test]
    fn reduces_to_exponential_near_q_one() {
        // at q = 1 +- 1e-6 the density matches (1/mu) exp(-tau/mu) to 1e-4 relative
        let mu = 0.7;
        let p = QExpParams::new(mu, 1.0 + 1e-6).unwrap();
        for &tau in &[0.0, 0.1, 0.5, 1.0, 3.0, 8.0] {
            let expo = (-tau / mu).exp() / mu;
            assert!(
                ((p.pdf(tau) - expo) / expo).abs() < 1e-4,
                "tau {tau}: {} vs {}",
                p.pdf(tau),
                expo
            );
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let samples = gen_qexp_iid(0.24, 1.67, 2_000, 5).unwrap();
        let n = samples.len() as f64;
        let nll = |theta: &[f64; 2]| {
            let mu = theta[0].exp();
            let qm1 = theta[1].exp();
            let e = -(1.0 + qm1) / qm1;
            let mean_ln_w =
                samples.iter().map(|&t| (1.0 + qm1 * t / mu).ln()).sum::<f64>() / n;
            -(-mu.ln() + e * mean_ln_w)
        };
        // reproduce the analytic gradient used by the fit
        let grad = |theta: &[f64; 2]| {
            let mu = theta[0].exp();
            let qm1 = theta[1].exp();
            let e = -(1.0 + qm1) / qm1;
            let mut mean_ln_w = 0.0;
            let mut mean_frac = 0.0;
            for &t in &samples {
                let w = 1.0 + qm1 * t / mu;
                mean_ln_w += w.ln();
                mean_frac += 1.0 - 1.0 / w;
            }
            mean_ln_w /= n;
            mean_frac /= n;
            [
                -(-1.0 - e * mean_frac),
                -(mean_ln_w / qm1 + e * mean_frac),
            ]
        };
        let theta = [0.3f64.ln(), 0.6f64.ln()];
        let g = grad(&theta);
        let h = 1e-6;
        for k in 0..2 {
            let mut tp = theta;
            let mut tm = theta;
            tp[k] += h;
            tm[k] -= h;
            let fd = (nll(&tp) - nll(&tm)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-5, "component {k}: fd {fd} analytic {}", g[k]);
        }
    }

    #[test]
    fn mle_recovers_paper_regime_parameters() {
        let samples = gen_qexp_iid(0.24, 1.67, 100_000, 777).unwrap();
        let fit = fit_qexp_mle(&samples).unwrap();
        let (mu, q) = fit.params.pair();
        assert!((mu - 0.24).abs() < 0.01, "mu {mu}");
        assert!((q - 1.67).abs() < 0.02, "q {q}");
    }

    #[test]
    fn mle_on_exponential_data_pins_q_near_one() {
        let samples = gen_poisson_durations(1.0 / 0.5, 100_000, 31).unwrap(); // mean 0.5
        let fit = fit_qexp_mle(&samples).unwrap();
        let (_, q) = fit.params.pair();
        assert!(q <= 1.05, "q {q}");
    }

    #[test]
    fn negative_sample_rejected() {
        let mut samples = gen_qexp_iid(0.24, 1.67, 500, 3).unwrap();
        samples[10] = -0.1;
        assert!(matches!(fit_qexp_mle(&samples), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_samples_are_legal_for_mle() {
        let mut samples = gen_qexp_iid(0.24, 1.67, 5_000, 11).unwrap();
        samples[0] = 0.0;
        samples[1] = 0.0;
        assert!(fit_qexp_mle(&samples).is_ok());
    }

    #[test]
    fn nlse_exact_on_noise_free_density() {
        let truth = QExpParams::new(0.24, 1.67).unwrap();
        let edges = crate::density::log_grid(1e-3, 100.0, 20).unwrap();
        let density = crate::density::DensityEstimate::from_model(&edges, |x| truth.pdf(x), 1000);
        let fit = fit_qexp_nlse(&density).unwrap();
        let (mu, q) = fit.params.pair();
        assert!((mu - 0.24).abs() < 1e-6, "mu {mu}");
        assert!((q - 1.67).abs() < 1e-6, "q {q}");
        assert!(fit.chi < 1e-8);
    }

    #[test]
    fn nlse_recovers_from_sampled_density() {
        let samples = gen_qexp_iid(0.24, 1.67, 1_000_000, 2025).unwrap();
        let density = empirical_density(&samples, 20).unwrap();
        let fit = fit_qexp_nlse(&density).unwrap();
        let (mu, q) = fit.params.pair();
        assert!((mu - 0.24).abs() < 0.03, "mu {mu}");
        assert!((q - 1.67).abs() < 0.05, "q {q}");
    }
}
