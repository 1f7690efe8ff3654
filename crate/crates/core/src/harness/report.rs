//! Per-repetition results, CSV output and summaries.

use super::config::{Algorithm, Target};
use crate::error::{Error, Result};
use crate::proposal::MixingDistribution;
use serde::Serialize;
use std::fmt::Write as _;
use std::time::Duration;

pub const CSV_HEADER: &str = "functional,algorithm,rep,estimate,se,draws_used_mean";

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalInfo {
    pub name: String,
    pub target: Target,
    pub reference: Option<f64>,
}

/// All repetitions of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub mix: Option<MixingDistribution>,
    /// Analytic mean draws per sample; one for the non-rejection samplers.
    pub expected_draws: f64,
    /// Mean draws per sample in each repetition.
    pub draws_used_mean: Vec<f64>,
    /// Indexed `[functional][rep]`.
    pub estimates: Vec<Vec<f64>>,
    pub ses: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub seed: u64,
    pub n: usize,
    pub reps: usize,
    pub functionals: Vec<FunctionalInfo>,
    pub runs: Vec<AlgorithmRun>,
    pub wall_time: Duration,
}

/// Sample mean and unbiased sample variance; the variance is NaN below two values.
pub fn mean_and_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = if x.len() < 2 { f64::NAN } else { x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) };
    (mean, var)
}

/// `var(mc) / var(is)` across repetitions.
pub fn reduction_factor(mc: &[f64], is: &[f64]) -> Result<f64> {
    if mc.len() != is.len() {
        return Err(Error::Config(format!("paired runs differ in repetitions: {} vs {}", mc.len(), is.len())));
    }
    if mc.len() < 2 {
        return Err(Error::EmptySample { needed: 2, got: mc.len() });
    }
    let (_, v_mc) = mean_and_variance(mc);
    let (_, v_is) = mean_and_variance(is);
    if !(v_is > 0.0) {
        return Err(Error::DegenerateVariance(format!("IS estimates have variance {v_is}")));
    }
    if !(v_mc > 0.0) {
        return Err(Error::DegenerateVariance(format!("MC estimates have variance {v_mc}")));
    }
    Ok(v_mc / v_is)
}

/// Reduction factor of `algorithm` in `is` against the plain run in `mc`.
pub fn paired_reduction_factor(mc: &ExperimentReport, is: &ExperimentReport, functional: &str, algorithm: Algorithm) -> Result<f64> {
    if mc.n != is.n {
        return Err(Error::Config(format!("paired runs differ in sample size: {} vs {}", mc.n, is.n)));
    }
    let missing = |what: &str| Error::Config(format!("no {what} estimates for `{functional}`"));
    let a = mc.estimates(functional, Algorithm::Mc).ok_or_else(|| missing("mc"))?;
    let b = is.estimates(functional, algorithm).ok_or_else(|| missing(algorithm.name()))?;
    reduction_factor(a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultSummary {
    pub functional: String,
    pub algorithm: Algorithm,
    pub mean: f64,
    pub variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub expected_draws: f64,
    pub draws_used_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mix: Option<MixingDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub n: usize,
    pub reps: usize,
    pub wall_time_secs: f64,
    pub algorithm: Vec<AlgorithmSummary>,
    pub result: Vec<ResultSummary>,
}

impl ExperimentReport {
    pub fn run(&self, algorithm: Algorithm) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }

    fn functional_index(&self, name: &str) -> Option<usize> {
        self.functionals.iter().position(|f| f.name == name)
    }

    /// Per-repetition estimates of `functional` under `algorithm`.
    pub fn estimates(&self, functional: &str, algorithm: Algorithm) -> Option<&[f64]> {
        let i = self.functional_index(functional)?;
        Some(&self.run(algorithm)?.estimates[i])
    }

    /// Reduction factor against the plain run of the same report.
    pub fn reduction_factor(&self, functional: &str, algorithm: Algorithm) -> Result<f64> {
        paired_reduction_factor(self, self, functional, algorithm)
    }

    /// Overrides the configured reference value of `functional`.
    pub fn set_reference(&mut self, functional: &str, value: f64) {
        if let Some(i) = self.functional_index(functional) {
            self.functionals[i].reference = Some(value);
        }
    }

    /// One row per (functional, algorithm, rep); deterministic given the config.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (i, f) in self.functionals.iter().enumerate() {
            for run in &self.runs {
                for rep in 0..self.reps {
                    let se = run.ses[i][rep].map(|s| s.to_string()).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        f.name, run.algorithm, rep, run.estimates[i][rep], se, run.draws_used_mean[rep]
                    );
                }
            }
        }
        out
    }

    pub fn summary(&self) -> Summary {
        let mut result = Vec::new();
        for (i, f) in self.functionals.iter().enumerate() {
            for run in &self.runs {
                let (mean, variance) = mean_and_variance(&run.estimates[i]);
                let delta = f.reference.map(|r| mean - r);
                let relative_delta = f.reference.filter(|r| *r != 0.0).map(|r| (mean - r) / r);
                let (reduction_factor, reduction_note) = match run.algorithm {
                    Algorithm::Mc => (None, None),
                    alg if self.run(Algorithm::Mc).is_some() => match self.reduction_factor(&f.name, alg) {
                        Ok(r) => (Some(r), None),
                        Err(e) => (None, Some(e.to_string())),
                    },
                    _ => (None, None),
                };
                result.push(ResultSummary {
                    functional: f.name.clone(),
                    algorithm: run.algorithm,
                    mean,
                    variance,
                    reference: f.reference,
                    delta,
                    relative_delta,
                    reduction_factor,
                    reduction_note,
                });
            }
        }
        let algorithm = self
            .runs
            .iter()
            .map(|r| AlgorithmSummary {
                algorithm: r.algorithm,
                expected_draws: r.expected_draws,
                draws_used_mean: mean_and_variance(&r.draws_used_mean).0,
                mix: r.mix.clone(),
            })
            .collect();
        Summary {
            seed: self.seed,
            n: self.n,
            reps: self.reps,
            wall_time_secs: self.wall_time.as_secs_f64(),
            algorithm,
            result,
        }
    }

    /// The summary as TOML.
    pub fn summary_text(&self) -> Result<String> {
        toml::to_string(&self.summary()).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(mc: Vec<f64>, is: Vec<f64>) -> ExperimentReport {
        let run = |algorithm, estimates: Vec<f64>| AlgorithmRun {
            algorithm,
            mix: None,
            expected_draws: 1.0,
            draws_used_mean: vec![1.0; estimates.len()],
            ses: vec![vec![Some(0.5); estimates.len()]],
            estimates: vec![estimates],
        };
        ExperimentReport {
            seed: 1,
            n: 100,
            reps: mc.len(),
            functionals: vec![FunctionalInfo { name: "sl".into(), target: Target::StopLoss { threshold: Some(1.0) }, reference: Some(2.0) }],
            runs: vec![run(Algorithm::Mc, mc), run(Algorithm::Direct, is)],
            wall_time: Duration::from_millis(5),
        }
    }

    #[test]
    fn identical_runs_give_unit_factor() {
        let x = vec![1.0, 3.0, 2.0, 5.0];
        assert_eq!(reduction_factor(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn halved_variance_gives_two() {
        let mc = vec![0.0, 2.0, 0.0, 2.0];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let is: Vec<f64> = mc.iter().map(|v| 1.0 + (v - 1.0) * s).collect();
        assert!((reduction_factor(&mc, &is).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_is_variance_is_degenerate() {
        let err = reduction_factor(&[1.0, 2.0], &[3.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateVariance(_)));
        let r = report(vec![1.0, 2.0], vec![3.0, 3.0]);
        let s = r.summary();
        assert!(s.result[1].reduction_factor.is_none());
        assert!(s.result[1].reduction_note.as_deref().unwrap().contains("degenerate"));
    }

    #[test]
    fn csv_layout_and_summary() {
        let r = report(vec![1.0, 3.0], vec![2.0, 2.5]);
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "sl,mc,0,1,0.5,1");
        assert_eq!(lines[4], "sl,direct,1,2.5,0.5,1");
        assert_eq!(lines.len(), 5);
        let s = r.summary();
        assert_eq!(s.result[0].delta, Some(0.0));
        assert_eq!(s.result[1].reduction_factor, Some(16.0));
        let text = r.summary_text().unwrap();
        assert!(text.contains("reduction_factor = 16.0"), "{text}");
    }
}
