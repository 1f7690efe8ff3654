//! Importance sampling for copula models.
//!
//! Proposal laws are threshold mixtures of the copula: a random threshold
//! `Lambda` is drawn and the sample is pushed out of `[0, Lambda]^d`, either
//! by rejection or by placing one coordinate above the threshold and filling
//! the rest from the conditional copula. Each draw carries its exact
//! likelihood ratio so that weighted averages are unbiased under the model.

pub mod calibration;
pub mod copula;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod margins;
pub mod proposal;
pub mod rng;
pub mod samplers;
pub mod shock;

mod roots;

pub use copula::{kendall_tau_to_param, Copula, Family};
pub use error::{Error, Result};
pub use margins::{case_study_margins, Margin};
pub use shock::{Shock, ShockModel};
pub use proposal::{DirectProposal, MixingDistribution, RejectionProposal, WeightedSample};
pub use samplers::{DirectSampler, PlainSampler, RejectionSampler, Sampler};
