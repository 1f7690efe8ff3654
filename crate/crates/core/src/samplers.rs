//! Samplers for the plain copula and both threshold-mixture proposals.

use crate::copula::archimedean::open01;
use crate::copula::Copula;
use crate::error::{Error, Result};
use crate::proposal::{DirectProposal, MixingDistribution, RejectionProposal, WeightedSample};
use rand::Rng;

/// Default cap on copula draws per rejection sample.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Largest double below one.
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// Keeps coordinates inside `(0, 1)` so margin quantiles stay finite.
#[inline]
fn clamp_open(v: &mut [f64]) {
    for x in v.iter_mut() {
        *x = x.clamp(f64::MIN_POSITIVE, ONE_BELOW);
    }
}

/// Bookkeeping of a single proposal draw written into a caller buffer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawInfo {
    pub weight: f64,
    pub lambda: f64,
    pub draws_used: u64,
    pub branch: Option<usize>,
}

impl DrawInfo {
    fn into_sample(self, v: Vec<f64>) -> WeightedSample {
        WeightedSample { v, weight: self.weight, lambda: self.lambda, draws_used: self.draws_used, branch: self.branch }
    }
}

/// Common interface of the three samplers.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;

    /// Writes one draw into `v` (length `d`).
    fn sample_into(&self, rng: &mut dyn rand::RngCore, v: &mut [f64]) -> Result<DrawInfo>;

    fn sample(&self, rng: &mut dyn rand::RngCore) -> Result<WeightedSample> {
        let mut v = vec![0.0; self.dim()];
        let info = self.sample_into(rng, &mut v)?;
        Ok(info.into_sample(v))
    }
}

/// Draws from the copula itself, weight one.
#[derive(Debug, Clone)]
pub struct PlainSampler<'a> {
    copula: &'a Copula,
}

impl<'a> PlainSampler<'a> {
    pub fn new(copula: &'a Copula) -> Self {
        Self { copula }
    }
}

impl Sampler for PlainSampler<'_> {
    fn dim(&self) -> usize {
        self.copula.dim()
    }

    fn sample_into(&self, rng: &mut dyn rand::RngCore, v: &mut [f64]) -> Result<DrawInfo> {
        self.copula.sample_into(rng, v);
        clamp_open(v);
        Ok(DrawInfo { weight: 1.0, lambda: 0.0, draws_used: 1, branch: None })
    }
}

/// Repeats copula draws until the maximum exceeds the drawn threshold.
///
/// Shock copulas sample the conditioned law exactly in one pass unless the
/// fast path is switched off.
#[derive(Debug, Clone)]
pub struct RejectionSampler<'a> {
    copula: &'a Copula,
    proposal: RejectionProposal,
    max_attempts: u64,
    shock_fast_path: bool,
}

impl<'a> RejectionSampler<'a> {
    pub fn new(copula: &'a Copula, mix: MixingDistribution) -> Result<Self> {
        Ok(Self {
            copula,
            proposal: RejectionProposal::new(mix, copula)?,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            shock_fast_path: true,
        })
    }

    pub fn with_max_attempts(mut self, max_attempts: u64) -> Self {
        self.max_attempts = max_attempts.max(1);
        self
    }

    pub fn with_shock_fast_path(mut self, enabled: bool) -> Self {
        self.shock_fast_path = enabled;
        self
    }

    pub fn proposal(&self) -> &RejectionProposal {
        &self.proposal
    }

    pub fn expected_draws(&self) -> f64 {
        self.proposal.expected_draws()
    }
}

impl Sampler for RejectionSampler<'_> {
    fn dim(&self) -> usize {
        self.copula.dim()
    }

    fn sample_into(&self, rng: &mut dyn rand::RngCore, v: &mut [f64]) -> Result<DrawInfo> {
        let lambda = self.proposal.mix().sample_lambda(rng);
        let mut draws_used = 0;
        match self.copula {
            Copula::Shock(model) if self.shock_fast_path && lambda > 0.0 => {
                model.sample_exceeding(lambda, rng, v)?;
                draws_used = 1;
            }
            _ => loop {
                if draws_used >= self.max_attempts {
                    return Err(Error::RunawayRejection { attempts: draws_used, lambda });
                }
                self.copula.sample_into(rng, v);
                draws_used += 1;
                if v.iter().any(|&x| x > lambda) {
                    break;
                }
            },
        }
        clamp_open(v);
        let weight = self.proposal.weight(v);
        Ok(DrawInfo { weight, lambda, draws_used, branch: None })
    }
}

/// Places one uniformly chosen coordinate on `(Lambda, 1)` and fills the
/// rest from the conditional copula.
#[derive(Debug, Clone)]
pub struct DirectSampler<'a> {
    copula: &'a Copula,
    proposal: DirectProposal,
}

impl<'a> DirectSampler<'a> {
    pub fn new(copula: &'a Copula, mix: MixingDistribution) -> Result<Self> {
        Ok(Self { copula, proposal: DirectProposal::new(mix, copula.dim())? })
    }

    pub fn proposal(&self) -> &DirectProposal {
        &self.proposal
    }
}

impl Sampler for DirectSampler<'_> {
    fn dim(&self) -> usize {
        self.copula.dim()
    }

    fn sample_into(&self, rng: &mut dyn rand::RngCore, v: &mut [f64]) -> Result<DrawInfo> {
        let d = self.copula.dim();
        let lambda = self.proposal.mix().sample_lambda(rng);
        let branch = rng.random_range(0..d);
        let top = (1.0 - (1.0 - lambda) * open01(rng)).clamp(f64::MIN_POSITIVE, ONE_BELOW);
        let ctx = self.copula.conditional(branch, top)?;
        // Fill the d - 1 free slots in order, then shift the conditioned value in.
        ctx.sample_into(rng, &mut v[..d - 1])?;
        v.copy_within(branch..d - 1, branch + 1);
        v[branch] = top;
        clamp_open(v);
        let weight = self.proposal.weight(v);
        Ok(DrawInfo { weight, lambda, draws_used: 1, branch: Some(branch) })
    }
}
