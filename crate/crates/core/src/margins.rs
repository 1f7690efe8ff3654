//! Marginal loss distributions.

use crate::error::{domain, Error, Result};
use crate::roots::{normal_cdf, normal_quantile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Margin {
    /// `ln X ~ N(mu, sigma^2)`.
    Lognormal { mu: f64, sigma: f64 },
    /// `F(x) = 1 - (1 + x / scale)^{-shape}` for `x >= 0`.
    Pareto { scale: f64, shape: f64 },
}

impl Margin {
    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Margin::Lognormal { mu, sigma }.validated()
    }

    /// Lognormal margin given the variance of `ln X`.
    pub fn lognormal_from_variance(mu: f64, variance: f64) -> Result<Self> {
        Self::lognormal(mu, variance.sqrt())
    }

    pub fn pareto(scale: f64, shape: f64) -> Result<Self> {
        Margin::Pareto { scale, shape }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Margin::Lognormal { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
            Margin::Pareto { scale, shape } => {
                scale > 0.0 && scale.is_finite() && shape > 0.0 && shape.is_finite()
            }
        };
        if ok {
            Ok(self)
        } else {
            domain(format!("invalid margin parameters: {self:?}"))
        }
    }

    /// Generalized inverse `inf { x : F(x) >= p }` for `p` in `[0, 1)`.
    #[inline]
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if p >= 1.0 {
            return Err(Error::UnboundedQuantile);
        }
        if !(p >= 0.0) {
            return domain(format!("probability must lie in [0, 1), got {p}"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(match *self {
            Margin::Lognormal { mu, sigma } => (mu + sigma * normal_quantile(p)).exp(),
            Margin::Pareto { scale, shape } => scale * ((-(-p).ln_1p() / shape).exp_m1()),
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        match *self {
            Margin::Lognormal { mu, sigma } => normal_cdf((x.ln() - mu) / sigma),
            Margin::Pareto { scale, shape } => -(-shape * (x / scale).ln_1p()).exp_m1(),
        }
    }

    /// Expected value, infinite for Pareto shapes at most one.
    pub fn mean(&self) -> f64 {
        match *self {
            Margin::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Margin::Pareto { scale, shape } => {
                if shape > 1.0 {
                    scale / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// Margins of the insurance case study: component `j = 1..d` is lognormal
/// with `mu = 10 - 0.1 j` and `sigma^2 = 1 + 0.2 j`.
pub fn case_study_margins(d: usize) -> Vec<Margin> {
    (1..=d)
        .map(|j| {
            let j = j as f64;
            Margin::Lognormal { mu: 10.0 - 0.1 * j, sigma: (1.0 + 0.2 * j).sqrt() }
        })
        .collect()
}
