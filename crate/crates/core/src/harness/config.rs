//! Experiment configuration, read from TOML.

use crate::calibration::DiscreteGrid;
use crate::copula::{kendall_tau_to_param, Copula, Family};
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::margins::{case_study_margins, Margin};
use crate::proposal::MixingDistribution;
use crate::rng::Lane;
use crate::shock::{Shock, ShockModel};
use serde::{Deserialize, Serialize};

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Mc,
    Rejection,
    Direct,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mc => "mc",
            Algorithm::Rejection => "rejection",
            Algorithm::Direct => "direct",
        }
    }

    pub fn lane(self) -> Lane {
        match self {
            Algorithm::Mc => Lane::PlainMc,
            Algorithm::Rejection => Lane::Rejection,
            Algorithm::Direct => Lane::Direct,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Algorithm::Mc),
            "rejection" => Ok(Algorithm::Rejection),
            "direct" => Ok(Algorithm::Direct),
            other => config_err(format!("unknown algorithm `{other}` (expected mc, rejection or direct)")),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Copula section. Give either `parameter` or `tau`; shock models list
/// their shocks and, per component, the 0-based shocks it is exposed to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopulaSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shocks: Option<Vec<Shock>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposures: Option<Vec<Vec<usize>>>,
}

impl CopulaSpec {
    pub fn build(&self, dim: usize) -> Result<Copula> {
        if self.family == Family::Shock {
            let (Some(shocks), Some(exposures)) = (&self.shocks, &self.exposures) else {
                return config_err("shock copula needs `shocks` and `exposures`");
            };
            let model = ShockModel::new(shocks.clone(), exposures.clone())?;
            if model.dim() != dim {
                return config_err(format!("shock model has dimension {}, expected {dim}", model.dim()));
            }
            return Ok(Copula::shock(model));
        }
        let parameter = match (self.parameter, self.tau) {
            (Some(p), None) => p,
            (None, Some(tau)) => kendall_tau_to_param(self.family, tau)?,
            (None, None) if self.family == Family::Independence => 0.0,
            (Some(_), Some(_)) => return config_err("give either `parameter` or `tau`, not both"),
            (None, None) => return config_err("copula needs `parameter` or `tau`"),
        };
        Copula::from_family(self.family, parameter, dim)
    }

    fn declared_dim(&self) -> Option<usize> {
        self.dim.or_else(|| self.exposures.as_ref().map(Vec::len))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginsSpec {
    /// `"case_study"`: `LN(10 - 0.1 j, 1 + 0.2 j)` for `j = 1..d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<Margin>>,
}

/// Quantity estimated in every repetition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum Target {
    /// `E[(S - threshold)^+]`; the threshold defaults to `1e5 d`.
    StopLoss {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threshold: Option<f64>,
    },
    IndicatorSumLeq { x: f64 },
    RareMaxIndicator { s: f64 },
    ProductMoment,
    Var { alpha: f64 },
    Es { alpha: f64 },
    /// `E[X_component | S > VaR_alpha(S)]`, 0-based component.
    Allocation { alpha: f64, component: usize },
}

impl Target {
    /// Whether the estimate is a weighted mean with a standard error.
    pub fn is_mean(&self) -> bool {
        matches!(
            self,
            Target::StopLoss { .. } | Target::IndicatorSumLeq { .. } | Target::RareMaxIndicator { .. } | Target::ProductMoment
        )
    }

    fn default_name(&self) -> String {
        match self {
            Target::StopLoss { .. } => "stop_loss".into(),
            Target::IndicatorSumLeq { x } => format!("cdf_sum_{x}"),
            Target::RareMaxIndicator { s } => format!("max_above_{s}"),
            Target::ProductMoment => "product_moment".into(),
            Target::Var { alpha } => format!("var_{alpha}"),
            Target::Es { alpha } => format!("es_{alpha}"),
            Target::Allocation { alpha, component } => format!("alloc_{alpha}_x{}", component + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub target: Target,
    /// Known value, reported as a delta in the summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

impl FunctionalSpec {
    pub fn new(name: &str, target: Target) -> Self {
        Self { name: Some(name.into()), target, reference: None }
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.target.default_name())
    }
}

/// The five case-study functionals under the names used by the fixtures.
pub fn case_study_functionals(dim: usize) -> Vec<FunctionalSpec> {
    vec![
        FunctionalSpec::new("stop_loss", Target::StopLoss { threshold: None }),
        FunctionalSpec::new("var_0.995", Target::Var { alpha: 0.995 }),
        FunctionalSpec::new("es_0.99", Target::Es { alpha: 0.99 }),
        FunctionalSpec::new("alloc_x1", Target::Allocation { alpha: 0.99, component: 0 }),
        FunctionalSpec::new("alloc_xd", Target::Allocation { alpha: 0.99, component: dim - 1 }),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalMethod {
    /// Geometric-grid discrete mix fitted to the objective diagonal.
    #[default]
    Discrete,
    /// Continuous mix fitted by least squares.
    Continuous,
    /// Mixes given verbatim in `mix`, `rejection_mix` or `direct_mix`.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalSpec {
    #[serde(default)]
    pub method: ProposalMethod,
    /// Stop-loss threshold of the calibration objective; defaults to the
    /// first stop-loss target, else `1e5 d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default = "default_atoms")]
    pub n_atoms: usize,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_floor")]
    pub zero_floor: f64,
    /// Cap on the expected rejection draws for continuous fits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_expected_draws: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<MixingDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection_mix: Option<MixingDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_mix: Option<MixingDistribution>,
}

fn default_atoms() -> usize {
    DiscreteGrid::default().n_atoms
}
fn default_ratio() -> f64 {
    DiscreteGrid::default().ratio
}
fn default_floor() -> f64 {
    DiscreteGrid::default().zero_floor
}

impl Default for ProposalSpec {
    fn default() -> Self {
        Self {
            method: ProposalMethod::Discrete,
            threshold: None,
            n_atoms: default_atoms(),
            ratio: default_ratio(),
            zero_floor: default_floor(),
            max_expected_draws: None,
            mix: None,
            rejection_mix: None,
            direct_mix: None,
        }
    }
}

impl ProposalSpec {
    pub fn grid(&self) -> DiscreteGrid {
        DiscreteGrid { n_atoms: self.n_atoms, ratio: self.ratio, zero_floor: self.zero_floor }
    }
}

fn default_reps() -> usize {
    200
}
fn default_n() -> usize {
    10_000
}
fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Mc, Algorithm::Rejection, Algorithm::Direct]
}
fn default_estimator() -> EstimatorKind {
    EstimatorKind::IsRaw
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    /// Mean estimator for the IS runs; plain runs always use the sample mean.
    /// Quantile-based targets always use normalized weights.
    #[serde(default = "default_estimator")]
    pub mean_estimator: EstimatorKind,
    /// Worker threads; zero uses every core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub copula: CopulaSpec,
    #[serde(default)]
    pub margins: MarginsSpec,
    #[serde(default)]
    pub functionals: Vec<FunctionalSpec>,
    #[serde(default)]
    pub proposal: ProposalSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Case-study experiment for a copula at dimension `dim`.
    pub fn case_study(family: Family, parameter: f64, dim: usize, seed: u64) -> Self {
        Self {
            seed,
            reps: default_reps(),
            n: default_n(),
            algorithms: default_algorithms(),
            mean_estimator: default_estimator(),
            threads: 0,
            out: None,
            copula: CopulaSpec { family, parameter: Some(parameter), tau: None, dim: Some(dim), shocks: None, exposures: None },
            margins: MarginsSpec { preset: Some("case_study".into()), list: None },
            functionals: case_study_functionals(dim),
            proposal: ProposalSpec::default(),
        }
    }

    pub fn dim(&self) -> Result<usize> {
        let from_copula = self.copula.declared_dim();
        let from_margins = self.margins.list.as_ref().map(Vec::len);
        match (from_copula, from_margins) {
            (Some(a), Some(b)) if a != b => config_err(format!("copula has dimension {a} but {b} margins are listed")),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => config_err("dimension is not given by the copula or the margins"),
        }
    }

    pub fn margins(&self) -> Result<Vec<Margin>> {
        let d = self.dim()?;
        match (&self.margins.preset, &self.margins.list) {
            (Some(p), None) if p == "case_study" => Ok(case_study_margins(d)),
            (Some(p), None) => config_err(format!("unknown margin preset `{p}`")),
            (None, Some(list)) => list.iter().map(|m| m.validated()).collect(),
            (None, None) => Ok(case_study_margins(d)),
            (Some(_), Some(_)) => config_err("give either a margin preset or a list, not both"),
        }
    }

    /// Threshold of the stop-loss objective used for calibration.
    pub fn calibration_threshold(&self) -> Result<f64> {
        if let Some(t) = self.proposal.threshold {
            return Ok(t);
        }
        Ok(self
            .functionals
            .iter()
            .find_map(|f| match f.target {
                Target::StopLoss { threshold } => threshold,
                _ => None,
            })
            .unwrap_or(1e5 * self.dim()? as f64))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 100 {
            return config_err(format!("n must be at least 100, got {}", self.n));
        }
        if self.reps == 0 {
            return config_err("reps must be at least 1");
        }
        if self.algorithms.is_empty() {
            return config_err("no algorithm selected");
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(a) = self.algorithms.iter().find(|a| !seen.insert(**a)) {
            return config_err(format!("algorithm `{a}` listed twice"));
        }
        let d = self.dim()?;
        self.margins()?;
        self.copula.build(d)?;
        let mut names = std::collections::HashSet::new();
        for f in &self.functionals {
            let name = f.name();
            if !names.insert(name.clone()) {
                return config_err(format!("functional `{name}` is listed twice"));
            }
            match f.target {
                Target::Var { alpha } | Target::Es { alpha } | Target::Allocation { alpha, .. } if !(alpha > 0.0 && alpha < 1.0) => {
                    return config_err(format!("`{name}`: level must lie in (0, 1), got {alpha}"));
                }
                Target::Allocation { component, .. } if component >= d => {
                    return config_err(format!("`{name}`: component {component} out of range for dimension {d}"));
                }
                Target::RareMaxIndicator { s } if !(s > 0.0 && s < 1.0) => {
                    return config_err(format!("`{name}`: s must lie in (0, 1), got {s}"));
                }
                _ => {}
            }
        }
        let p = &self.proposal;
        if p.method == ProposalMethod::Explicit {
            for alg in &self.algorithms {
                if *alg != Algorithm::Mc && self.explicit_mix(*alg).is_none() {
                    return config_err(format!("explicit proposal has no mix for `{alg}`"));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn explicit_mix(&self, alg: Algorithm) -> Option<&MixingDistribution> {
        let p = &self.proposal;
        match alg {
            Algorithm::Mc => None,
            Algorithm::Rejection => p.rejection_mix.as_ref().or(p.mix.as_ref()),
            Algorithm::Direct => p.direct_mix.as_ref().or(p.mix.as_ref()),
        }
    }
}
