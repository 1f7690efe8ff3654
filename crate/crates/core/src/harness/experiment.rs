//! Calibration and the repetition battery.

use super::config::{Algorithm, ExperimentConfig, ProposalMethod, Target};
use super::report::{AlgorithmRun, ExperimentReport, FunctionalInfo};
use crate::calibration::{calibrate_continuous, calibrate_discrete_direct, calibrate_discrete_rejection, Flavor};
use crate::copula::Copula;
use crate::error::{Error, Result};
use crate::estimators::{euler_allocation, Estimate, EstimatorKind, Functional, WeightedLosses};
use crate::margins::Margin;
use crate::proposal::{MixingDistribution, WeightedSample};
use crate::rng::derive_stream;
use crate::samplers::{DirectSampler, PlainSampler, RejectionSampler, Sampler};
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
struct ResolvedFunctional {
    name: String,
    target: Target,
    reference: Option<f64>,
}

/// A validated config with its copula, margins and proposal mixes built.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    copula: Copula,
    margins: Vec<Margin>,
    functionals: Vec<ResolvedFunctional>,
    mixes: Vec<Option<MixingDistribution>>,
}

/// Estimates of every functional from one repetition of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOutcome {
    pub estimates: Vec<f64>,
    /// `None` for quantile-based functionals.
    pub ses: Vec<Option<f64>>,
    pub draws_used_mean: f64,
}

/// Fits the proposal mix of one IS algorithm to the stop-loss diagonal.
pub fn calibrate_mix(config: &ExperimentConfig, copula: &Copula, margins: &[Margin], algorithm: Algorithm) -> Result<MixingDistribution> {
    let threshold = config.calibration_threshold()?;
    let objective = Functional::stop_loss(threshold, margins.to_vec());
    let psi = |t: f64| objective.on_diagonal(t).unwrap_or(f64::NAN);
    let p = &config.proposal;
    let mix = match (p.method, algorithm) {
        (_, Algorithm::Mc) => return Err(Error::Config("plain Monte Carlo has no proposal".into())),
        (ProposalMethod::Explicit, alg) => {
            let mix = config.explicit_mix(alg).cloned().ok_or_else(|| Error::Config(format!("no explicit mix for `{alg}`")))?;
            mix.validate()?;
            Ok(mix)
        }
        (ProposalMethod::Discrete, Algorithm::Rejection) => calibrate_discrete_rejection(psi, copula, &p.grid()),
        (ProposalMethod::Discrete, Algorithm::Direct) => calibrate_discrete_direct(psi, &p.grid()),
        (ProposalMethod::Continuous, Algorithm::Rejection) => {
            let alpha = copula.diagonal_exponent();
            calibrate_continuous(psi, Flavor::Rejection, alpha, p.max_expected_draws)
                .and_then(|fit| fit.into_mix(Flavor::Rejection, alpha))
        }
        (ProposalMethod::Continuous, Algorithm::Direct) => {
            calibrate_continuous(psi, Flavor::Direct, None, None).and_then(|fit| fit.into_mix(Flavor::Direct, None))
        }
    };
    mix.map_err(|e| Error::Config(format!("calibrating the {algorithm} proposal (threshold {threshold}): {e}")))
}

impl Experiment {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let d = config.dim()?;
        let copula = config.copula.build(d)?;
        let margins = config.margins()?;
        let functionals = config
            .functionals
            .iter()
            .map(|f| {
                let target = match f.target {
                    Target::StopLoss { threshold: None } => Target::StopLoss { threshold: Some(1e5 * d as f64) },
                    t => t,
                };
                ResolvedFunctional { name: f.name(), target, reference: f.reference }
            })
            .collect();
        let mixes = config
            .algorithms
            .iter()
            .map(|&alg| match alg {
                Algorithm::Mc => Ok(None),
                _ => calibrate_mix(config, &copula, &margins, alg).map(Some),
            })
            .collect::<Result<_>>()?;
        Ok(Self { config: config.clone(), copula, margins, functionals, mixes })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn copula(&self) -> &Copula {
        &self.copula
    }

    pub fn margins(&self) -> &[Margin] {
        &self.margins
    }

    /// Proposal mix of `algorithm`, if it is configured and not plain MC.
    pub fn mix(&self, algorithm: Algorithm) -> Option<&MixingDistribution> {
        let i = self.config.algorithms.iter().position(|&a| a == algorithm)?;
        self.mixes[i].as_ref()
    }

    fn sampler(&self, algorithm: Algorithm) -> Result<Box<dyn Sampler + '_>> {
        let mix = || {
            self.mix(algorithm)
                .cloned()
                .ok_or_else(|| Error::Config(format!("algorithm `{algorithm}` is not configured")))
        };
        Ok(match algorithm {
            Algorithm::Mc => Box::new(PlainSampler::new(&self.copula)),
            Algorithm::Rejection => Box::new(RejectionSampler::new(&self.copula, mix()?)?),
            Algorithm::Direct => Box::new(DirectSampler::new(&self.copula, mix()?)?),
        })
    }

    fn expected_draws(&self, algorithm: Algorithm) -> Result<f64> {
        Ok(match algorithm {
            Algorithm::Rejection => RejectionSampler::new(&self.copula, self.mix(algorithm).cloned().unwrap_or_else(MixingDistribution::point_mass_at_zero))?
                .expected_draws(),
            _ => 1.0,
        })
    }

    /// `n` draws of repetition `rep` from the proposal of `algorithm`.
    pub fn draw(&self, algorithm: Algorithm, rep: u64, n: usize) -> Result<Vec<WeightedSample>> {
        let sampler = self.sampler(algorithm)?;
        let mut rng = derive_stream(self.config.seed, rep, algorithm.lane());
        (0..n).map(|_| sampler.sample(&mut rng)).collect()
    }

    fn run_rep(&self, sampler: &dyn Sampler, algorithm: Algorithm, rep: u64) -> Result<RepOutcome> {
        let n = self.config.n;
        let d = self.copula.dim();
        let mut rng = derive_stream(self.config.seed, rep, algorithm.lane());
        let needs_sums = self.functionals.iter().any(|f| !f.target.is_mean());
        let needs_rows = self.functionals.iter().any(|f| matches!(f.target, Target::Allocation { .. }));

        let mut u = vec![0.0; d];
        let mut x = vec![0.0; d];
        let mut weights = Vec::with_capacity(n);
        let mut values: Vec<Vec<f64>> = self
            .functionals
            .iter()
            .map(|f| if f.target.is_mean() { Vec::with_capacity(n) } else { Vec::new() })
            .collect();
        let mut sums = Vec::with_capacity(if needs_sums { n } else { 0 });
        let mut rows = Vec::with_capacity(if needs_rows { n * d } else { 0 });
        let mut draws = 0u64;

        for _ in 0..n {
            let info = sampler.sample_into(&mut rng, &mut u)?;
            draws += info.draws_used;
            weights.push(info.weight);
            for ((xj, m), &uj) in x.iter_mut().zip(&self.margins).zip(&u) {
                *xj = m.quantile(uj)?;
            }
            let s: f64 = x.iter().sum();
            for (f, vals) in self.functionals.iter().zip(values.iter_mut()) {
                let v = match f.target {
                    Target::StopLoss { threshold } => (s - threshold.unwrap_or(0.0)).max(0.0),
                    Target::IndicatorSumLeq { x: level } => f64::from(s <= level),
                    Target::RareMaxIndicator { s: level } => f64::from(u.iter().any(|&v| v > level)),
                    Target::ProductMoment => x.iter().product(),
                    _ => continue,
                };
                vals.push(v);
            }
            if needs_sums {
                sums.push(s);
            }
            if needs_rows {
                rows.extend_from_slice(&x);
            }
        }

        let estimator = match algorithm {
            Algorithm::Mc => EstimatorKind::Mc,
            _ => self.config.mean_estimator,
        };
        let losses = if needs_sums { Some(WeightedLosses::new(&sums, &weights)?) } else { None };
        let row_refs: Vec<&[f64]> = rows.chunks_exact(d).collect();
        let mut estimates = Vec::with_capacity(self.functionals.len());
        let mut ses = Vec::with_capacity(self.functionals.len());
        for (f, vals) in self.functionals.iter().zip(&values) {
            let (est, se) = match f.target {
                Target::Var { alpha } => (losses.as_ref().map(|l| l.value_at_risk(alpha)).unwrap_or(f64::NAN), None),
                Target::Es { alpha } => (losses.as_ref().map(|l| l.expected_shortfall(alpha)).unwrap_or(f64::NAN), None),
                Target::Allocation { alpha, component } => (euler_allocation(&row_refs, &weights, component, alpha)?, None),
                _ => {
                    let e = Estimate::compute(vals, &weights, estimator)?;
                    (e.value, Some(e.se))
                }
            };
            estimates.push(est);
            ses.push(se);
        }
        Ok(RepOutcome { estimates, ses, draws_used_mean: draws as f64 / n as f64 })
    }

    /// One repetition of `algorithm` with index `rep`.
    pub fn repetition(&self, algorithm: Algorithm, rep: u64) -> Result<RepOutcome> {
        let sampler = self.sampler(algorithm)?;
        self.run_rep(sampler.as_ref(), algorithm, rep)
    }

    /// Runs every repetition of every configured algorithm.
    pub fn run(&self) -> Result<ExperimentReport> {
        let start = Instant::now();
        let algorithms = self.config.algorithms.clone();
        let samplers = algorithms.iter().map(|&a| self.sampler(a)).collect::<Result<Vec<_>>>()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let outcomes: Vec<Vec<RepOutcome>> = pool.install(|| {
            (0..self.config.reps as u64)
                .into_par_iter()
                .map(|rep| {
                    algorithms
                        .iter()
                        .zip(&samplers)
                        .map(|(&alg, s)| self.run_rep(s.as_ref(), alg, rep))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })?;

        let k = self.functionals.len();
        let mut runs = Vec::with_capacity(algorithms.len());
        for (a, &alg) in algorithms.iter().enumerate() {
            let mut estimates = vec![Vec::with_capacity(self.config.reps); k];
            let mut ses = vec![Vec::with_capacity(self.config.reps); k];
            let mut draws = Vec::with_capacity(self.config.reps);
            for rep in &outcomes {
                let o = &rep[a];
                for i in 0..k {
                    estimates[i].push(o.estimates[i]);
                    ses[i].push(o.ses[i]);
                }
                draws.push(o.draws_used_mean);
            }
            runs.push(AlgorithmRun {
                algorithm: alg,
                mix: self.mixes[a].clone(),
                expected_draws: self.expected_draws(alg)?,
                draws_used_mean: draws,
                estimates,
                ses,
            });
        }
        Ok(ExperimentReport {
            seed: self.config.seed,
            n: self.config.n,
            reps: self.config.reps,
            functionals: self
                .functionals
                .iter()
                .map(|f| FunctionalInfo { name: f.name.clone(), target: f.target, reference: f.reference })
                .collect(),
            runs,
            wall_time: start.elapsed(),
        })
    }
}

/// Prepares and runs `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    Experiment::prepare(config)?.run()
}
