//! Calibration of the mixing law so that the inverse weight tracks the
//! objective along the diagonal, `w(t 1)^{-1} ~ K Psi(t 1)`.

mod simplex;

use crate::copula::Copula;
use crate::error::{domain, Error, Result};
use crate::proposal::{MixingDistribution, RejectionProposal};
use serde::{Deserialize, Serialize};
use simplex::NelderMead;

/// Geometric grid `x_k = 1 - ratio^{k-1}` and the mass forced onto zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteGrid {
    pub n_atoms: usize,
    pub ratio: f64,
    pub zero_floor: f64,
}

impl Default for DiscreteGrid {
    fn default() -> Self {
        Self { n_atoms: 10, ratio: 0.5, zero_floor: 0.1 }
    }
}

impl DiscreteGrid {
    fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return domain("the grid needs at least one atom");
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return domain(format!("grid ratio must lie in (0, 1), got {}", self.ratio));
        }
        if !(self.zero_floor > 0.0 && self.zero_floor < 1.0) {
            return domain(format!("zero-atom floor must lie in (0, 1), got {}", self.zero_floor));
        }
        Ok(())
    }

    pub fn atoms(&self) -> Vec<f64> {
        (0..self.n_atoms).map(|k| 1.0 - self.ratio.powi(k as i32)).collect()
    }
}

/// Normalized calibration weights before the zero-atom floor.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteWeights {
    pub atoms: Vec<f64>,
    pub probs: Vec<f64>,
    /// Sum of the unnormalized weights, the proportionality constant.
    pub scale: f64,
}

impl DiscreteWeights {
    /// Applies the floor on `P[Lambda = 0]`, rescaling the other atoms.
    pub fn into_mix(self, zero_floor: f64) -> Result<MixingDistribution> {
        let DiscreteWeights { atoms, mut probs, .. } = self;
        if probs[0] < zero_floor {
            let rest = 1.0 - probs[0];
            let factor = if rest > 0.0 { (1.0 - zero_floor) / rest } else { 0.0 };
            for p in probs.iter_mut().skip(1) {
                *p *= factor;
            }
            probs[0] = zero_floor;
        }
        MixingDistribution::discrete(atoms, probs)
    }
}

/// Weights `p_1 ~ Psi(0)` and `p_k ~ (Psi(x_k 1) - Psi(x_{k-1} 1)) g(x_k)`.
fn triangular_weights<F, G>(psi_diag: F, atoms: Vec<f64>, gap: G) -> Result<DiscreteWeights>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let psi: Vec<f64> = atoms.iter().map(|&x| psi_diag(x)).collect();
    if !psi[0].is_finite() {
        return domain(format!("objective is not finite at the origin ({})", psi[0]));
    }
    let mut raw = Vec::with_capacity(atoms.len());
    raw.push(psi[0]);
    if psi[0] < 0.0 {
        return Err(Error::NegativeWeight { k: 1, previous: 0.0, current: psi[0] });
    }
    for k in 1..atoms.len() {
        if !psi[k].is_finite() {
            return domain(format!("objective is not finite at grid point {}", atoms[k]));
        }
        let step = psi[k] - psi[k - 1];
        if step < 0.0 {
            return Err(Error::NegativeWeight { k: k + 1, previous: psi[k - 1], current: psi[k] });
        }
        raw.push(step * gap(atoms[k]));
    }
    let scale: f64 = raw.iter().sum();
    let probs = if scale > 0.0 {
        raw.iter().map(|p| p / scale).collect()
    } else {
        let mut p = vec![0.0; atoms.len()];
        p[0] = 1.0;
        p
    };
    Ok(DiscreteWeights { atoms, probs, scale })
}

/// Unfloored weights for the rejection sampler, with gaps `1 - C(x_k 1)`.
pub fn discrete_weights_rejection<F: Fn(f64) -> f64>(psi_diag: F, copula: &Copula, grid: &DiscreteGrid) -> Result<DiscreteWeights> {
    grid.validate()?;
    triangular_weights(psi_diag, grid.atoms(), |x| 1.0 - copula.diagonal(x))
}

/// Unfloored weights for the direct sampler, with gaps `1 - x_k`.
pub fn discrete_weights_direct<F: Fn(f64) -> f64>(psi_diag: F, grid: &DiscreteGrid) -> Result<DiscreteWeights> {
    grid.validate()?;
    triangular_weights(psi_diag, grid.atoms(), |x| 1.0 - x)
}

pub fn calibrate_discrete_rejection<F: Fn(f64) -> f64>(psi_diag: F, copula: &Copula, grid: &DiscreteGrid) -> Result<MixingDistribution> {
    discrete_weights_rejection(psi_diag, copula, grid)?.into_mix(grid.zero_floor)
}

pub fn calibrate_discrete_direct<F: Fn(f64) -> f64>(psi_diag: F, grid: &DiscreteGrid) -> Result<MixingDistribution> {
    discrete_weights_direct(psi_diag, grid)?.into_mix(grid.zero_floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Rejection,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousFit {
    pub beta: f64,
    pub gamma: f64,
    /// Fitted proportionality constant.
    pub k: f64,
    /// Root mean squared residual relative to the root mean square of the objective.
    pub relative_residual: f64,
}

impl ContinuousFit {
    /// Mixing law of the given flavor; `alpha` is required for rejection.
    pub fn into_mix(self, flavor: Flavor, alpha: Option<f64>) -> Result<MixingDistribution> {
        match flavor {
            Flavor::Rejection => {
                let alpha = alpha.ok_or_else(|| Error::Domain("rejection flavor needs alpha".into()))?;
                MixingDistribution::continuous_rejection(alpha, self.beta, self.gamma)
            }
            Flavor::Direct => MixingDistribution::continuous_direct(self.beta, self.gamma),
        }
    }
}

const FIT_POINTS: usize = 512;
const FIT_UPPER: f64 = 1.0 - 1e-6;
/// Keeps the fitted gamma strictly below one.
const GAMMA_MAX: f64 = 1.0 - 1e-9;

/// Inverse weight along the diagonal divided by `K`:
/// `1 + gamma (1 - beta (1 - t^alpha)^{beta - 1}) / (beta - 1)`.
pub fn continuous_profile(t: f64, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let tail = ((-t.powf(alpha)).ln_1p() * (beta - 1.0)).exp();
    1.0 + gamma * (1.0 - beta * tail) / (beta - 1.0)
}

/// Least-squares fit of the continuous mixing law to the objective on a
/// uniform grid, with `K` profiled out and `(beta, gamma)` searched over
/// `(ln(beta - 1), logit gamma)`. The direct flavor uses `alpha = 1`.
pub fn calibrate_continuous<F: Fn(f64) -> f64>(
    psi_diag: F,
    flavor: Flavor,
    alpha: Option<f64>,
    max_expected_draws: Option<f64>,
) -> Result<ContinuousFit> {
    let alpha = match flavor {
        Flavor::Direct => 1.0,
        Flavor::Rejection => match alpha {
            Some(a) if a >= 1.0 && a.is_finite() => a,
            other => return domain(format!("rejection flavor needs a diagonal exponent >= 1, got {other:?}")),
        },
    };
    if let Some(cap) = max_expected_draws {
        if !(cap > 1.0) {
            return domain(format!("expected-draws cap must exceed 1, got {cap}"));
        }
    }
    let grid: Vec<f64> = (0..FIT_POINTS).map(|i| FIT_UPPER * i as f64 / (FIT_POINTS - 1) as f64).collect();
    let psi: Vec<f64> = grid.iter().map(|&t| psi_diag(t)).collect();
    if let Some(i) = psi.iter().position(|v| !v.is_finite()) {
        return domain(format!("objective is not finite at t = {}", grid[i]));
    }
    let norm: f64 = psi.iter().map(|v| v * v).sum();
    if norm == 0.0 {
        return domain("objective vanishes on the whole fit grid");
    }

    let decode = |z: &[f64]| -> (f64, f64) {
        let beta = 1.0 + z[0].exp();
        let mut gamma = (1.0 / (1.0 + (-z[1]).exp())).min(GAMMA_MAX);
        if let Some(cap) = max_expected_draws {
            gamma = gamma.min((cap - 1.0) * (beta - 1.0));
        }
        (beta, gamma)
    };
    let profile = |beta: f64, gamma: f64| -> (f64, f64) {
        let mut gg = 0.0;
        let mut gp = 0.0;
        for (&t, &p) in grid.iter().zip(&psi) {
            let g = continuous_profile(t, alpha, beta, gamma);
            gg += g * g;
            gp += g * p;
        }
        let k = gp / gg;
        let rss: f64 = grid
            .iter()
            .zip(&psi)
            .map(|(&t, &p)| (p - k * continuous_profile(t, alpha, beta, gamma)).powi(2))
            .sum();
        (k, rss / norm)
    };

    let nm = NelderMead::default();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &b0 in &[0.5f64, 2.0, 9.0] {
        for &g0 in &[0.3f64, 0.7, 0.95] {
            let start = [(b0).ln(), (g0 / (1.0 - g0)).ln()];
            let (z, v) = nm.minimize(
                |z| {
                    let (beta, gamma) = decode(z);
                    profile(beta, gamma).1
                },
                &start,
            );
            if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                best = Some((z, v));
            }
        }
    }
    let (z, _) = best.expect("at least one start");
    let (beta, gamma) = decode(&z);
    let (k, rel) = profile(beta, gamma);
    Ok(ContinuousFit { beta, gamma, k, relative_residual: rel.sqrt() })
}

/// Makes `s` an atom carrying at least mass `eps`, scaling the others.
pub fn ensure_atom(mix: &MixingDistribution, s: f64, eps: f64) -> Result<MixingDistribution> {
    let MixingDistribution::Discrete { atoms, probs } = mix else {
        return domain("atoms can only be inserted into a discrete mix");
    };
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("atom location must lie in (0, 1), got {s}"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("atom mass must lie in (0, 1), got {eps}"));
    }
    let (mut atoms, mut probs) = (atoms.clone(), probs.clone());
    match atoms.iter().position(|&x| x == s) {
        Some(i) if probs[i] >= eps => return Ok(mix.clone()),
        Some(i) => {
            let factor = (1.0 - eps) / (1.0 - probs[i]);
            for (j, p) in probs.iter_mut().enumerate() {
                *p = if j == i { eps } else { *p * factor };
            }
        }
        None => {
            let i = atoms.partition_point(|&x| x < s);
            for p in probs.iter_mut() {
                *p *= 1.0 - eps;
            }
            atoms.insert(i, s);
            probs.insert(i, eps);
        }
    }
    MixingDistribution::discrete(atoms, probs)
}

/// `E_{F_V}[Psi^2 w^2] = E_C[Psi w]` for `Psi = 1{max_i u_i > s}` under
/// the rejection proposal, from the law `t -> C(t 1)` of the maximum.
pub fn rare_event_second_moment(proposal: &RejectionProposal, copula: &Copula, s: f64) -> Result<f64> {
    let MixingDistribution::Discrete { atoms, .. } = proposal.mix() else {
        return domain("the analytic second moment needs a discrete mix");
    };
    let mut total = 0.0;
    for (k, &x) in atoms.iter().enumerate() {
        let hi = atoms.get(k + 1).copied().unwrap_or(1.0);
        let lo = x.max(s);
        if hi <= lo {
            continue;
        }
        let mass = copula.diagonal(hi) - copula.diagonal(lo);
        if mass > 0.0 {
            total += proposal.weight_at(x) * mass;
        }
    }
    Ok(total)
}
