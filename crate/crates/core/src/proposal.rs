//! Mixing laws of the threshold `Lambda` and the likelihood ratios of the
//! resulting proposals.
//!
//! Two proposals are built from a mixing law. The rejection proposal mixes
//! `C` conditioned on `max_i U_i > lambda`; its weight depends on `u` only
//! through `t = max_i u_i`. The direct proposal picks a coordinate uniformly,
//! places it uniformly on `(lambda, 1)` and fills the rest from the
//! conditional copula; its weight depends on all coordinates but needs no
//! copula evaluation.

use crate::copula::archimedean::open01;
use crate::copula::Copula;
use crate::error::{domain, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Law of the threshold `Lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MixingDistribution {
    /// Atoms `x_1 = 0 < x_2 < ... < 1` with probabilities `p_k`.
    Discrete { atoms: Vec<f64>, probs: Vec<f64> },
    /// Mass `1 - gamma` at zero; otherwise `Lambda^alpha ~ Beta(1, beta)`.
    ContinuousRejection { alpha: f64, beta: f64, gamma: f64 },
    /// Mass `1 - gamma` at zero; otherwise `Lambda ~ Beta(1, beta)`.
    ContinuousDirect { beta: f64, gamma: f64 },
}

const SUM_TOLERANCE: f64 = 1e-9;

impl MixingDistribution {
    pub fn discrete(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let mix = MixingDistribution::Discrete { atoms, probs };
        mix.validate()?;
        Ok(mix)
    }

    /// All mass at zero: the proposal is the copula itself.
    pub fn point_mass_at_zero() -> Self {
        MixingDistribution::Discrete { atoms: vec![0.0], probs: vec![1.0] }
    }

    pub fn continuous_rejection(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let mix = MixingDistribution::ContinuousRejection { alpha, beta, gamma };
        mix.validate()?;
        Ok(mix)
    }

    pub fn continuous_direct(beta: f64, gamma: f64) -> Result<Self> {
        let mix = MixingDistribution::ContinuousDirect { beta, gamma };
        mix.validate()?;
        Ok(mix)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MixingDistribution::Discrete { atoms, probs } => {
                if atoms.is_empty() || atoms.len() != probs.len() {
                    return domain("discrete mix needs matching, non-empty atoms and probabilities");
                }
                if atoms[0] != 0.0 {
                    return domain("the first atom must be zero");
                }
                if atoms.windows(2).any(|w| !(w[0] < w[1])) || !(atoms[atoms.len() - 1] < 1.0) {
                    return domain("atoms must be strictly increasing and below one");
                }
                if probs.iter().any(|p| !(*p >= 0.0)) {
                    return domain("probabilities must be non-negative");
                }
                if !(probs[0] > 0.0) {
                    return domain("the atom at zero must carry positive mass");
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > SUM_TOLERANCE {
                    return domain(format!("probabilities sum to {total}, not 1"));
                }
            }
            MixingDistribution::ContinuousRejection { alpha, beta, gamma } => {
                if !(*alpha >= 1.0 && alpha.is_finite()) {
                    return domain(format!("alpha must be at least 1, got {alpha}"));
                }
                check_beta_gamma(*beta, *gamma)?;
            }
            MixingDistribution::ContinuousDirect { beta, gamma } => check_beta_gamma(*beta, *gamma)?,
        }
        Ok(())
    }

    /// `P[Lambda = 0]`.
    pub fn zero_mass(&self) -> f64 {
        match self {
            MixingDistribution::Discrete { probs, .. } => probs[0],
            MixingDistribution::ContinuousRejection { gamma, .. }
            | MixingDistribution::ContinuousDirect { gamma, .. } => 1.0 - gamma,
        }
    }

    pub fn sample_lambda<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MixingDistribution::Discrete { atoms, probs } => {
                if atoms.len() == 1 {
                    return 0.0;
                }
                let mut u = rng.random::<f64>();
                for (x, p) in atoms.iter().zip(probs) {
                    if u < *p {
                        return *x;
                    }
                    u -= p;
                }
                // Rounding in the cumulative sum: take the last atom with mass.
                let last = probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
                atoms[last]
            }
            MixingDistribution::ContinuousRejection { alpha, beta, gamma } => {
                if rng.random::<f64>() >= *gamma {
                    return 0.0;
                }
                let y = beta_one(*beta, rng);
                y.powf(1.0 / alpha)
            }
            MixingDistribution::ContinuousDirect { beta, gamma } => {
                if rng.random::<f64>() >= *gamma {
                    return 0.0;
                }
                beta_one(*beta, rng)
            }
        }
    }

    /// `E[1 / (1 - Lambda)]`, which brackets the rejection waiting time
    /// between `1/d` times itself and itself.
    pub fn expected_inverse_gap(&self) -> Option<f64> {
        match self {
            MixingDistribution::Discrete { atoms, probs } => {
                Some(atoms.iter().zip(probs).map(|(x, p)| p / (1.0 - x)).sum())
            }
            MixingDistribution::ContinuousDirect { beta, gamma } => Some(1.0 + gamma / (beta - 1.0)),
            MixingDistribution::ContinuousRejection { .. } => None,
        }
    }
}

fn check_beta_gamma(beta: f64, gamma: f64) -> Result<()> {
    if !(beta > 1.0 && beta.is_finite()) {
        return domain(format!("beta must exceed 1, got {beta}"));
    }
    if gamma == 1.0 {
        return domain("gamma = 1 leaves no mass at zero and makes the weight variance infinite");
    }
    if !(0.0..1.0).contains(&gamma) {
        return domain(format!("gamma must lie in [0, 1), got {gamma}"));
    }
    Ok(())
}

/// `Beta(1, beta)` by inversion, `1 - (1 - U)^{1/beta}`.
fn beta_one<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    let u = open01(rng);
    -((-u).ln_1p() / beta).exp_m1()
}

/// Draw from a proposal together with its likelihood ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub v: Vec<f64>,
    pub weight: f64,
    /// Realized threshold.
    pub lambda: f64,
    /// Copula draws consumed, one for the direct sampler.
    pub draws_used: u64,
    /// Coordinate placed above the threshold by the direct sampler.
    pub branch: Option<usize>,
}

/// Rejection proposal with the diagonal values `C(x_k 1)` and the weight
/// step function precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionProposal {
    mix: MixingDistribution,
    diagonal: Vec<f64>,
    /// `sum_{l <= k} p_l / (1 - C(x_l 1))`.
    cumulative: Vec<f64>,
}

impl RejectionProposal {
    pub fn new(mix: MixingDistribution, copula: &Copula) -> Result<Self> {
        mix.validate()?;
        let (diagonal, cumulative) = match &mix {
            MixingDistribution::Discrete { atoms, probs } => {
                let diagonal: Vec<f64> = atoms.iter().map(|&x| copula.diagonal(x)).collect();
                let mut acc = 0.0;
                let cumulative = probs
                    .iter()
                    .zip(&diagonal)
                    .map(|(p, c)| {
                        acc += p / (1.0 - c);
                        acc
                    })
                    .collect();
                (diagonal, cumulative)
            }
            MixingDistribution::ContinuousRejection { alpha, .. } => {
                match copula.diagonal_exponent() {
                    Some(a) if (a - alpha).abs() <= 1e-12 * a => {}
                    other => {
                        return domain(format!(
                            "continuous rejection mix has alpha = {alpha} but the copula diagonal exponent is {other:?}"
                        ))
                    }
                }
                (Vec::new(), Vec::new())
            }
            MixingDistribution::ContinuousDirect { .. } => {
                return domain("a continuous direct mix cannot drive the rejection sampler")
            }
        };
        Ok(Self { mix, diagonal, cumulative })
    }

    pub fn mix(&self) -> &MixingDistribution {
        &self.mix
    }

    /// Cached `C(x_k 1)` for a discrete mix.
    pub fn diagonal_values(&self) -> &[f64] {
        &self.diagonal
    }

    /// Weight as a function of `t = max_i u_i`.
    pub fn weight_at(&self, t: f64) -> f64 {
        match &self.mix {
            MixingDistribution::Discrete { atoms, .. } => {
                let k = atoms.partition_point(|&x| x <= t).max(1) - 1;
                1.0 / self.cumulative[k]
            }
            MixingDistribution::ContinuousRejection { alpha, beta, gamma } => {
                let tail = (-t.powf(*alpha)).ln_1p() * (beta - 1.0);
                (beta - 1.0) / (beta - 1.0 + gamma * (1.0 - beta * tail.exp()))
            }
            MixingDistribution::ContinuousDirect { .. } => unreachable!("rejected at construction"),
        }
    }

    pub fn weight(&self, u: &[f64]) -> f64 {
        self.weight_at(u.iter().copied().fold(0.0, f64::max))
    }

    /// `E[N_V] = E[1 / (1 - C(Lambda 1))]`.
    pub fn expected_draws(&self) -> f64 {
        match &self.mix {
            MixingDistribution::Discrete { probs, .. } => {
                probs.iter().zip(&self.diagonal).map(|(p, c)| p / (1.0 - c)).sum()
            }
            MixingDistribution::ContinuousRejection { beta, gamma, .. } => 1.0 + gamma / (beta - 1.0),
            MixingDistribution::ContinuousDirect { .. } => unreachable!("rejected at construction"),
        }
    }
}

/// Direct proposal with the weight step function precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectProposal {
    mix: MixingDistribution,
    dim: usize,
    /// `sum_{l <= k} p_l / (1 - x_l)`.
    cumulative: Vec<f64>,
}

impl DirectProposal {
    pub fn new(mix: MixingDistribution, dim: usize) -> Result<Self> {
        mix.validate()?;
        let cumulative = match &mix {
            MixingDistribution::Discrete { atoms, probs } => {
                let mut acc = 0.0;
                atoms
                    .iter()
                    .zip(probs)
                    .map(|(x, p)| {
                        acc += p / (1.0 - x);
                        acc
                    })
                    .collect()
            }
            MixingDistribution::ContinuousDirect { .. } => Vec::new(),
            MixingDistribution::ContinuousRejection { .. } => {
                return domain("a continuous rejection mix cannot drive the direct sampler")
            }
        };
        if dim == 0 {
            return domain("dimension must be positive");
        }
        Ok(Self { mix, dim, cumulative })
    }

    pub fn mix(&self) -> &MixingDistribution {
        &self.mix
    }

    pub fn weight(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let d = self.dim as f64;
        match &self.mix {
            MixingDistribution::Discrete { atoms, .. } => {
                let total: f64 = u
                    .iter()
                    .map(|&ui| self.cumulative[atoms.partition_point(|&x| x <= ui).max(1) - 1])
                    .sum();
                d / total
            }
            MixingDistribution::ContinuousDirect { beta, gamma } => {
                let s: f64 = u.iter().map(|&ui| ((-ui).ln_1p() * (beta - 1.0)).exp()).sum();
                (beta - 1.0) / (beta - 1.0 + gamma - gamma * beta * s / d)
            }
            MixingDistribution::ContinuousRejection { .. } => unreachable!("rejected at construction"),
        }
    }
}
