//! Distribution fitting: Weibull and q-exponential families, each by
//! maximum likelihood and by nonlinear least squares on binned densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod optim;
pub mod qexp;
pub mod weibull;

pub use qexp::{fit_qexp_mle, fit_qexp_mle_with_bins, fit_qexp_nlse, QExpParams};
pub use weibull::{
    fit_weibull_mle, fit_weibull_mle_with_bins, fit_weibull_nlse, WeibullParams,
};

/// Distribution family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitFamily {
    Weibull,
    QExp,
}

impl FitFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitFamily::Weibull => "weibull",
            FitFamily::QExp => "qexp",
        }
    }
}

impl std::str::FromStr for FitFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weibull" | "wbl" => Ok(FitFamily::Weibull),
            "qexp" | "q-exponential" => Ok(FitFamily::QExp),
            other => Err(Error::invalid(format!("unknown family {other:?}"))),
        }
    }
}

/// Estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Mle,
    Nlse,
}

impl Estimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Mle => "mle",
            Estimator::Nlse => "nlse",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Estimator::Mle),
            "nlse" => Ok(Estimator::Nlse),
            other => Err(Error::invalid(format!("unknown estimator {other:?}"))),
        }
    }
}

/// Fitted parameters of either family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitParams {
    Weibull(WeibullParams),
    QExp(QExpParams),
}

impl FitParams {
    /// `(alpha, beta)` for Weibull, `(mu, q)` for the q-exponential.
    pub fn pair(&self) -> (f64, f64) {
        match self {
            FitParams::Weibull(p) => (p.alpha(), p.beta()),
            FitParams::QExp(p) => (p.mu(), p.q()),
        }
    }

    /// Density of the fitted model at `tau`.
    pub fn pdf(&self, tau: f64) -> f64 {
        match self {
            FitParams::Weibull(p) => p.pdf(tau),
            FitParams::QExp(p) => p.pdf(tau),
        }
    }
}

/// One fitted distribution with its residual r.m.s. and convergence
/// diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: FitFamily,
    pub estimator: Estimator,
    pub params: FitParams,
    /// R.m.s. of log10-density residuals over non-empty bins.
    pub chi: f64,
    /// Number of samples behind the fit.
    pub n: usize,
    pub iterations: usize,
    pub grad_norm: f64,
}
