//! Weibull primitives and likelihood estimation from upper records.
//!
//! For records `r_0 < ... < r_n` the log joint density is
//! `(n+1) ln b - b (n+1) ln a + (b-1) sum ln r_j - (r_n / a)^b`,
//! which yields closed-form maximum likelihood estimates. Standard errors
//! come from the observed information (see [`crate::hessian`]).

use alloc::format;

use crate::error::{Error, Result};
use crate::hessian::se_from_hessian;
use crate::records::RecordSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeibullParams {
    pub alpha: f64,
    pub beta: f64,
}

impl WeibullParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!(
                "Weibull parameters must be positive, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        weibull_cdf(x, self)
    }
}

/// Which likelihood produced a [`WeibullFit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FitModel {
    Separate,
    Pooled,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WeibullFit {
    pub params: WeibullParams,
    pub se_alpha: f64,
    pub se_beta: f64,
    pub loglik: f64,
    pub model: FitModel,
}

/// Equal-shape fit of two populations.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PooledFit {
    pub beta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub se_beta: f64,
    pub se_alpha1: f64,
    pub se_alpha2: f64,
    pub loglik: f64,
}

impl PooledFit {
    /// Parameter vector in the order `(alpha1, alpha2, beta)`.
    pub fn theta(&self) -> [f64; 3] {
        [self.alpha1, self.alpha2, self.beta]
    }
}

/// `1 - exp(-(x/alpha)^beta)`; zero for `x <= 0`.
pub fn weibull_cdf(x: f64, params: &WeibullParams) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -libm::expm1(-libm::pow(x / params.alpha, params.beta))
}

/// Log joint density of the record series.
pub fn record_loglik(series: &RecordSeries, params: &WeibullParams) -> f64 {
    loglik_raw(series, params.alpha, params.beta)
}

fn loglik_raw(series: &RecordSeries, alpha: f64, beta: f64) -> f64 {
    if !(alpha > 0.0 && beta > 0.0) {
        return f64::NEG_INFINITY;
    }
    let k = series.len() as f64;
    let sum_log: f64 = series.values().iter().map(|r| libm::log(*r)).sum();
    k * libm::log(beta) - beta * k * libm::log(alpha) + (beta - 1.0) * sum_log
        - libm::exp(beta * (libm::log(series.last()) - libm::log(alpha)))
}

/// `sum_j ln(r_n / r_j)`, accumulated as differences of logs.
pub(crate) fn log_spread(series: &RecordSeries) -> f64 {
    let top = libm::log(series.last());
    series.values().iter().map(|r| top - libm::log(*r)).sum()
}

fn scale_estimate(series: &RecordSeries, beta: f64) -> f64 {
    // r_n / (n+1)^(1/beta), in logs
    libm::exp(libm::log(series.last()) - libm::log(series.len() as f64) / beta)
}

/// Closed-form shape estimate `(n+1) / sum_j ln(r_n / r_j)`.
pub fn mle_beta(series: &RecordSeries) -> Result<f64> {
    series.require_inference_ready()?;
    let spread = log_spread(series);
    if spread.is_nan() || spread <= 0.0 {
        return Err(Error::DegenerateData("records have zero log spread".into()));
    }
    Ok(series.len() as f64 / spread)
}

/// Separate maximum likelihood fit of one record series.
pub fn mle_records(series: &RecordSeries) -> Result<WeibullFit> {
    let beta = mle_beta(series)?;
    let alpha = scale_estimate(series, beta);
    let se = se_from_hessian(|p| loglik_raw(series, p[0], p[1]), &[alpha, beta])?;
    Ok(WeibullFit {
        params: WeibullParams { alpha, beta },
        se_alpha: se[0],
        se_beta: se[1],
        loglik: loglik_raw(series, alpha, beta),
        model: FitModel::Separate,
    })
}

/// Joint log-likelihood of two series sharing the shape; `theta = (alpha1, alpha2, beta)`.
pub fn pooled_loglik(series1: &RecordSeries, series2: &RecordSeries, theta: &[f64; 3]) -> f64 {
    loglik_raw(series1, theta[0], theta[2]) + loglik_raw(series2, theta[1], theta[2])
}

/// Maximum likelihood fit under a common shape parameter.
pub fn pooled_mle(series1: &RecordSeries, series2: &RecordSeries) -> Result<PooledFit> {
    series1.require_inference_ready()?;
    series2.require_inference_ready()?;
    let spread = log_spread(series1) + log_spread(series2);
    if spread.is_nan() || spread <= 0.0 {
        return Err(Error::DegenerateData("records have zero log spread".into()));
    }
    let beta = (series1.len() + series2.len()) as f64 / spread;
    let alpha1 = scale_estimate(series1, beta);
    let alpha2 = scale_estimate(series2, beta);
    let theta = [alpha1, alpha2, beta];
    let se = se_from_hessian(
        |p| pooled_loglik(series1, series2, &[p[0], p[1], p[2]]),
        &theta,
    )?;
    Ok(PooledFit {
        beta,
        alpha1,
        alpha2,
        se_beta: se[2],
        se_alpha1: se[0],
        se_alpha2: se[1],
        loglik: pooled_loglik(series1, series2, &theta),
    })
}
