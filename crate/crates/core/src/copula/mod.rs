//! Copula families: evaluation, diagonal section, sampling and conditional
//! sampling given one coordinate.

pub(crate) mod archimedean;
mod fgm;

pub use archimedean::{Clayton, Frank, Gumbel};
pub use fgm::Fgm;

use crate::error::{domain, Error, Result};
use crate::shock::ShockModel;
use archimedean::{invert_conditional, open01};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Independence,
    Clayton,
    Gumbel,
    Frank,
    Fgm,
    Shock,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Copula {
    Independence { dim: usize },
    Clayton(Clayton),
    Gumbel(Gumbel),
    Frank(Frank),
    Fgm(Fgm),
    Shock(ShockModel),
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return domain(format!("copula dimension must be at least 2, got {dim}"));
    }
    Ok(())
}

impl Copula {
    pub fn independence(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula::Independence { dim })
    }

    pub fn clayton(theta: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula::Clayton(Clayton::new(theta, dim)?))
    }

    pub fn gumbel(theta: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula::Gumbel(Gumbel::new(theta, dim)?))
    }

    pub fn frank(alpha: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula::Frank(Frank::new(alpha, dim)?))
    }

    pub fn fgm(theta: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula::Fgm(Fgm::new(theta, dim)?))
    }

    pub fn shock(model: ShockModel) -> Self {
        Copula::Shock(model)
    }

    /// Builds a copula from a family tag and its single parameter.
    pub fn from_family(family: Family, parameter: f64, dim: usize) -> Result<Self> {
        match family {
            Family::Independence => Self::independence(dim),
            Family::Clayton => Self::clayton(parameter, dim),
            Family::Gumbel => Self::gumbel(parameter, dim),
            Family::Frank => Self::frank(parameter, dim),
            Family::Fgm => Self::fgm(parameter, dim),
            Family::Shock => Err(Error::Unsupported(
                "shock copulas are built from a ShockModel".into(),
            )),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Copula::Independence { .. } => Family::Independence,
            Copula::Clayton(_) => Family::Clayton,
            Copula::Gumbel(_) => Family::Gumbel,
            Copula::Frank(_) => Family::Frank,
            Copula::Fgm(_) => Family::Fgm,
            Copula::Shock(_) => Family::Shock,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Copula::Independence { dim } => *dim,
            Copula::Clayton(c) => c.dim(),
            Copula::Gumbel(c) => c.dim(),
            Copula::Frank(c) => c.dim(),
            Copula::Fgm(c) => c.dim(),
            Copula::Shock(m) => m.dim(),
        }
    }

    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return domain(format!("expected {} coordinates, got {}", self.dim(), u.len()));
        }
        if u.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return domain("copula arguments must lie in [0, 1]");
        }
        Ok(match self {
            Copula::Independence { .. } => u.iter().product(),
            Copula::Clayton(c) => c.cdf(u),
            Copula::Gumbel(c) => c.cdf(u),
            Copula::Frank(c) => c.cdf(u),
            Copula::Fgm(c) => c.cdf(u),
            Copula::Shock(m) => m.cdf(u)?,
        })
    }

    /// `C(t, ..., t)`.
    pub fn diagonal(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        if t == 1.0 {
            return 1.0;
        }
        match self {
            Copula::Independence { dim } => t.powi(*dim as i32),
            Copula::Clayton(c) => c.diagonal(t),
            Copula::Gumbel(c) => c.diagonal(t),
            Copula::Frank(c) => c.diagonal(t),
            Copula::Fgm(c) => c.diagonal(t),
            Copula::Shock(m) => match m.diagonal_exponent() {
                Some(alpha) => t.powf(alpha),
                None => m.cdf(&vec![t; m.dim()]).unwrap_or(f64::NAN),
            },
        }
    }

    /// The exponent `alpha` if the diagonal is exactly `t^alpha`.
    pub fn diagonal_exponent(&self) -> Option<f64> {
        match self {
            Copula::Independence { dim } => Some(*dim as f64),
            Copula::Gumbel(c) => Some(c.diagonal_exponent()),
            Copula::Shock(m) => m.diagonal_exponent(),
            Copula::Fgm(c) if c.theta() == 0.0 => Some(c.dim() as f64),
            _ => None,
        }
    }

    /// Fills `out` (length `d`) with one draw from the copula.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        match self {
            Copula::Independence { .. } => out.iter_mut().for_each(|x| *x = open01(rng)),
            Copula::Clayton(c) => c.sample_into(rng, out),
            Copula::Gumbel(c) => c.sample_into(rng, out),
            Copula::Frank(c) => c.sample_into(rng, out),
            Copula::Fgm(c) => c.sample_into(rng, out),
            Copula::Shock(m) => m.sample_into(rng, out),
        }
    }

    /// `n` independent draws, one row each.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                let mut row = vec![0.0; self.dim()];
                self.sample_into(rng, &mut row);
                row
            })
            .collect()
    }

    /// The conditional copula of the other `d - 1` coordinates given
    /// `U_k = u_k`.
    pub fn conditional(&self, k: usize, u_k: f64) -> Result<ConditionalCopula<'_>> {
        if k >= self.dim() {
            return domain(format!("conditioning index {k} out of range for d = {}", self.dim()));
        }
        if !(u_k > 0.0 && u_k < 1.0) {
            return domain(format!("conditioning value must lie in (0, 1), got {u_k}"));
        }
        let reduced = match self {
            Copula::Independence { .. } => ReducedForm::Independence,
            Copula::Fgm(c) => ReducedForm::Fgm { theta: c.theta() * (1.0 - 2.0 * u_k) },
            Copula::Clayton(c) => ReducedForm::Clayton { prefix: c.psi_inv(u_k) },
            Copula::Gumbel(c) => ReducedForm::Gumbel { prefix: c.psi_inv(u_k) },
            Copula::Frank(c) => ReducedForm::Amh { theta: c.amh_parameter(u_k) },
            Copula::Shock(m) => ReducedForm::Shock { level: m.component_quantile(k, u_k)? },
        };
        Ok(ConditionalCopula { copula: self, index: k, value: u_k, reduced })
    }

    fn check_conditioning(&self, target: usize, conditioned: &[(usize, f64)]) -> Result<()> {
        let d = self.dim();
        if target >= d {
            return domain(format!("target index {target} out of range for d = {d}"));
        }
        let mut seen = vec![false; d];
        for &(j, u) in conditioned {
            if j >= d || j == target || seen[j] {
                return domain(format!("invalid conditioning index {j}"));
            }
            seen[j] = true;
            if !(u > 0.0 && u < 1.0) {
                return domain(format!("conditioning value must lie in (0, 1), got {u}"));
            }
        }
        Ok(())
    }

    /// Distribution function at `v` of coordinate `target` given the
    /// coordinates in `conditioned` (index, value).
    pub fn conditional_cdf(&self, target: usize, conditioned: &[(usize, f64)], v: f64) -> Result<f64> {
        self.check_conditioning(target, conditioned)?;
        if v <= 0.0 {
            return Ok(0.0);
        }
        if v >= 1.0 {
            return Ok(1.0);
        }
        let m = conditioned.len();
        if m == 0 {
            return Ok(v);
        }
        Ok(match self {
            Copula::Independence { .. } => v,
            Copula::Fgm(c) => {
                if m + 1 < c.dim() {
                    v
                } else {
                    fgm::last_cdf(fgm_weight(c.theta(), conditioned), v)
                }
            }
            Copula::Clayton(c) => archimedean_cdf(|m, t| c.ln_abs_derivative(m, t), |u| c.psi_inv(u), conditioned, v),
            Copula::Gumbel(c) => archimedean_cdf(|m, t| c.ln_abs_derivative(m, t), |u| c.psi_inv(u), conditioned, v),
            Copula::Frank(c) => {
                if m == 1 {
                    c.single_conditional_cdf(conditioned[0].1, v)
                } else {
                    archimedean_cdf(|m, t| c.ln_abs_derivative(m, t), |u| c.psi_inv(u), conditioned, v)
                }
            }
            Copula::Shock(_) => {
                return Err(Error::Unsupported(
                    "conditional distribution functions of shock copulas".into(),
                ))
            }
        })
    }

    /// Quantile at `q` of coordinate `target` given the coordinates in
    /// `conditioned` (index, value).
    pub fn conditional_quantile(&self, target: usize, conditioned: &[(usize, f64)], q: f64) -> Result<f64> {
        self.check_conditioning(target, conditioned)?;
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("probability must lie in (0, 1), got {q}"));
        }
        let m = conditioned.len();
        if m == 0 {
            return Ok(q);
        }
        match self {
            Copula::Independence { .. } => Ok(q),
            Copula::Fgm(c) => Ok(if m + 1 < c.dim() {
                q
            } else {
                fgm::last_quantile(fgm_weight(c.theta(), conditioned), q)
            }),
            Copula::Clayton(c) => {
                let s = conditioned.iter().map(|&(_, u)| c.psi_inv(u)).sum();
                Ok(c.psi(c.conditional_increment(s, m, q)))
            }
            Copula::Gumbel(c) => {
                let s = conditioned.iter().map(|&(_, u)| c.psi_inv(u)).sum();
                Ok(c.psi(c.conditional_increment(s, m, q)?))
            }
            Copula::Frank(c) => {
                if m == 1 {
                    Ok(c.single_conditional_quantile(conditioned[0].1, q))
                } else {
                    let s = conditioned.iter().map(|&(_, u)| c.psi_inv(u)).sum();
                    invert_conditional(|m, t| c.ln_abs_derivative(m, t), |u| c.psi_inv(u), s, m, q)
                }
            }
            Copula::Shock(_) => Err(Error::Unsupported("conditional quantiles of shock copulas".into())),
        }
    }
}

fn fgm_weight(theta: f64, conditioned: &[(usize, f64)]) -> f64 {
    conditioned.iter().fold(theta, |w, &(_, u)| w * (1.0 - 2.0 * u))
}

fn archimedean_cdf<F, G>(ln_deriv: F, psi_inv: G, conditioned: &[(usize, f64)], v: f64) -> f64
where
    F: Fn(usize, f64) -> f64,
    G: Fn(f64) -> f64,
{
    let m = conditioned.len();
    let s: f64 = conditioned.iter().map(|&(_, u)| psi_inv(u)).sum();
    (ln_deriv(m, s + psi_inv(v)) - ln_deriv(m, s)).exp().clamp(0.0, 1.0)
}

/// Family-specific representation of a conditional copula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReducedForm {
    Independence,
    /// FGM copula of dimension `d - 1` with this parameter.
    Fgm { theta: f64 },
    /// Ali-Mikhail-Haq copula parameter of the Frank conditional.
    Amh { theta: f64 },
    /// Generator argument `psi^{-1}(u_k)` that starts the sequential inversion.
    Clayton { prefix: f64 },
    Gumbel { prefix: f64 },
    /// Level `x = F_{X_k}^{-1}(u_k)` reached by component `k`.
    Shock { level: f64 },
}

/// Law of the other `d - 1` coordinates given `U_k = u_k`.
#[derive(Debug, Clone)]
pub struct ConditionalCopula<'a> {
    copula: &'a Copula,
    index: usize,
    value: f64,
    reduced: ReducedForm,
}

impl ConditionalCopula<'_> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn reduced(&self) -> ReducedForm {
        self.reduced
    }

    pub fn dim(&self) -> usize {
        self.copula.dim() - 1
    }

    /// Fills `out` (length `d - 1`, original order with index `k` removed).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.dim());
        match (self.copula, self.reduced) {
            (Copula::Fgm(_), ReducedForm::Fgm { theta }) => fgm::fill(theta, rng, out),
            (Copula::Clayton(c), ReducedForm::Clayton { prefix }) => {
                let mut s = prefix;
                for (i, x) in out.iter_mut().enumerate() {
                    let inc = c.conditional_increment(s, i + 1, open01(rng));
                    *x = c.psi(inc);
                    s += inc;
                }
            }
            (Copula::Gumbel(c), ReducedForm::Gumbel { prefix }) => {
                if c.theta() == 1.0 {
                    out.iter_mut().for_each(|x| *x = open01(rng));
                    return Ok(());
                }
                let mut s = prefix;
                for (i, x) in out.iter_mut().enumerate() {
                    let inc = c.conditional_increment(s, i + 1, open01(rng))?;
                    *x = c.psi(inc);
                    s += inc;
                }
            }
            (Copula::Frank(c), ReducedForm::Amh { .. }) => c.conditional_sample_into(self.value, rng, out),
            (Copula::Shock(m), ReducedForm::Shock { level }) => m.conditional_sample_into(self.index, level, rng, out),
            _ => out.iter_mut().for_each(|x| *x = open01(rng)),
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out)?;
        Ok(out)
    }
}

/// Parameter matching a Kendall's tau for the bivariate member of `family`.
pub fn kendall_tau_to_param(family: Family, tau: f64) -> Result<f64> {
    match family {
        Family::Clayton if tau > 0.0 && tau < 1.0 => Ok(2.0 * tau / (1.0 - tau)),
        Family::Gumbel if (0.0..1.0).contains(&tau) => Ok(1.0 / (1.0 - tau)),
        Family::Fgm if tau.abs() <= 2.0 / 9.0 => Ok(4.5 * tau),
        Family::Independence if tau == 0.0 => Ok(0.0),
        Family::Frank | Family::Shock => Err(Error::Unsupported(format!(
            "no Kendall's tau conversion for {family:?}"
        ))),
        _ => domain(format!("Kendall's tau {tau} is not attainable for {family:?}")),
    }
}
