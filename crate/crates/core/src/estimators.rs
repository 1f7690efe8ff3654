//! Objective functionals, mean estimators and weighted risk measures.

use crate::error::{Error, Result};
use crate::margins::Margin;
use crate::proposal::WeightedSample;
use serde::{Deserialize, Serialize};

/// Function of the copula sample whose expectation is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalKind {
    /// `max(S - threshold, 0)` with `S` the sum of the losses.
    StopLoss { threshold: f64 },
    /// `1{S <= x}`.
    IndicatorSumLeq { x: f64 },
    /// `1{max_i u_i > s}`; needs no margins.
    RareMaxIndicator { s: f64 },
    /// Product of the losses.
    ProductMoment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub kind: FunctionalKind,
    pub margins: Vec<Margin>,
}

impl Functional {
    pub fn new(kind: FunctionalKind, margins: Vec<Margin>) -> Self {
        Self { kind, margins }
    }

    pub fn stop_loss(threshold: f64, margins: Vec<Margin>) -> Self {
        Self::new(FunctionalKind::StopLoss { threshold }, margins)
    }

    /// Sum of the margin quantiles of `u`.
    pub fn aggregate(&self, u: &[f64]) -> Result<f64> {
        self.margins.iter().zip(u).map(|(m, &p)| m.quantile(p)).sum()
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        Ok(match self.kind {
            FunctionalKind::StopLoss { threshold } => (self.aggregate(u)? - threshold).max(0.0),
            FunctionalKind::IndicatorSumLeq { x } => f64::from(self.aggregate(u)? <= x),
            FunctionalKind::RareMaxIndicator { s } => f64::from(u.iter().any(|&v| v > s)),
            FunctionalKind::ProductMoment => {
                self.margins.iter().zip(u).map(|(m, &p)| m.quantile(p)).product::<Result<f64>>()?
            }
        })
    }

    /// `Psi(t, ..., t)`, the input to calibration.
    pub fn on_diagonal(&self, t: f64) -> Result<f64> {
        let d = self.margins.len().max(1);
        self.eval(&vec![t; d])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Mc,
    IsRaw,
    IsSelfNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub n: usize,
    pub estimator: EstimatorKind,
}

fn need_two(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::EmptySample { needed: 2, got: n });
    }
    Ok(())
}

fn mean_and_se(y: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = y.clone().sum::<f64>() / n as f64;
    let ss: f64 = y.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

impl Estimate {
    /// Plain Monte Carlo mean with the sample standard error.
    pub fn plain(values: &[f64]) -> Result<Self> {
        need_two(values.len())?;
        let (value, se) = mean_and_se(values.iter().copied(), values.len());
        Ok(Self { value, se, n: values.len(), estimator: EstimatorKind::Mc })
    }

    /// Importance-sampling mean of `Psi w`.
    pub fn raw(values: &[f64], weights: &[f64]) -> Result<Self> {
        need_two(values.len())?;
        let (value, se) = mean_and_se(values.iter().zip(weights).map(|(v, w)| v * w), values.len());
        Ok(Self { value, se, n: values.len(), estimator: EstimatorKind::IsRaw })
    }

    /// `sum w Psi / sum w` with the delta-method standard error.
    pub fn self_normalized(values: &[f64], weights: &[f64]) -> Result<Self> {
        need_two(values.len())?;
        let total: f64 = weights.iter().sum();
        let value = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
        let ss: f64 = values
            .iter()
            .zip(weights)
            .map(|(v, w)| (w * (v - value)).powi(2))
            .sum();
        Ok(Self { value, se: ss.sqrt() / total, n: values.len(), estimator: EstimatorKind::IsSelfNormalized })
    }

    pub fn compute(values: &[f64], weights: &[f64], estimator: EstimatorKind) -> Result<Self> {
        match estimator {
            EstimatorKind::Mc => Self::plain(values),
            EstimatorKind::IsRaw => Self::raw(values, weights),
            EstimatorKind::IsSelfNormalized => Self::self_normalized(values, weights),
        }
    }
}

/// Estimates `E[Psi(U)]` from proposal draws.
pub fn estimate_mean(samples: &[WeightedSample], functional: &Functional, estimator: EstimatorKind) -> Result<Estimate> {
    let values: Vec<f64> = samples.iter().map(|s| functional.eval(&s.v)).collect::<Result<_>>()?;
    let weights: Vec<f64> = samples.iter().map(|s| s.weight).collect();
    Estimate::compute(&values, &weights, estimator)
}

/// Weighted empirical distribution of aggregate losses.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLosses {
    /// Losses in ascending order, ties kept in input order.
    sorted: Vec<f64>,
    /// Normalized weights aligned with `sorted`.
    weights: Vec<f64>,
}

impl WeightedLosses {
    /// Builds the distribution; weights are normalized to sum to one.
    pub fn new(losses: &[f64], weights: &[f64]) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::EmptySample { needed: 1, got: 0 });
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegenerateVariance(format!("weights sum to {total}")));
        }
        let mut order: Vec<usize> = (0..losses.len()).collect();
        order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]));
        Ok(Self {
            sorted: order.iter().map(|&i| losses[i]).collect(),
            weights: order.iter().map(|&i| weights[i] / total).collect(),
        })
    }

    /// Smallest loss whose cumulative weight reaches `alpha`.
    pub fn value_at_risk(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        for (s, w) in self.sorted.iter().zip(&self.weights) {
            acc += w;
            if acc >= alpha {
                return *s;
            }
        }
        self.sorted[self.sorted.len() - 1]
    }

    /// Tail average of the weighted empirical distribution above level `alpha`.
    pub fn expected_shortfall(&self, alpha: f64) -> f64 {
        let q = self.value_at_risk(alpha);
        let excess: f64 = self
            .sorted
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w * (s - q).max(0.0))
            .sum();
        q + excess / (1.0 - alpha)
    }
}

fn check_level(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("risk level must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

pub fn weighted_var(losses: &[f64], weights: &[f64], alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(WeightedLosses::new(losses, weights)?.value_at_risk(alpha))
}

pub fn weighted_es(losses: &[f64], weights: &[f64], alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(WeightedLosses::new(losses, weights)?.expected_shortfall(alpha))
}

/// `E[X_j | S > VaR_alpha(S)]` under the weighted empirical law; `rows`
/// holds the component losses of each sample.
pub fn euler_allocation<R: AsRef<[f64]>>(rows: &[R], weights: &[f64], j: usize, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    let sums: Vec<f64> = rows.iter().map(|r| r.as_ref().iter().sum()).collect();
    let q = WeightedLosses::new(&sums, weights)?.value_at_risk(alpha);
    let (mut num, mut den) = (0.0, 0.0);
    for ((row, s), w) in rows.iter().zip(&sums).zip(weights) {
        if *s > q {
            num += w * row.as_ref()[j];
            den += w;
        }
    }
    if den <= 0.0 {
        return Err(Error::DegenerateTail { alpha });
    }
    Ok(num / den)
}
