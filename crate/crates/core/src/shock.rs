//! Shock copulas: components are maxima over shared independent shocks,
//! `X_i = max_{j in I_i} Z_j`.
//!
//! Shock and component indices are zero-based. With all shocks Fréchet the
//! induced copula is of Marshall-Olkin type and has a closed form and a
//! monomial diagonal.

use crate::copula::archimedean::open01;
use crate::error::{domain, Error, Result};
use crate::roots::bracketed_root;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Distribution of a single shock, supported on `(0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Shock {
    /// `F(x) = exp(-scale / x)`.
    Frechet { scale: f64 },
    /// `F(x) = 1 - exp(-rate x)`.
    Exponential { rate: f64 },
}

impl Shock {
    fn validate(&self) -> Result<()> {
        let p = match *self {
            Shock::Frechet { scale } => scale,
            Shock::Exponential { rate } => rate,
        };
        if !(p > 0.0 && p.is_finite()) {
            return domain(format!("shock parameter must be positive and finite: {self:?}"));
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Shock::Frechet { scale } => (-scale / x).exp(),
            Shock::Exponential { rate } => -(-rate * x).exp_m1(),
        }
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            Shock::Frechet { scale } => -scale / x,
            Shock::Exponential { rate } => (-(-rate * x).exp_m1()).ln(),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        match *self {
            Shock::Frechet { scale } => -scale / p.ln(),
            Shock::Exponential { rate } => -(-p).ln_1p() / rate,
        }
    }

    /// Value whose survival probability is `q`.
    fn upper_quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return f64::INFINITY;
        }
        if q >= 1.0 {
            return 0.0;
        }
        match *self {
            Shock::Frechet { scale } => -scale / (-q).ln_1p(),
            Shock::Exponential { rate } => -q.ln() / rate,
        }
    }

    /// `f(x) / F(x)`.
    fn reverse_hazard(&self, x: f64) -> f64 {
        match *self {
            Shock::Frechet { scale } => scale / (x * x),
            Shock::Exponential { rate } => rate / (rate * x).exp_m1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockModel {
    shocks: Vec<Shock>,
    exposures: Vec<Vec<usize>>,
    /// For each shock, the components exposed to it.
    exposed: Vec<Vec<usize>>,
    /// Component Fréchet scales when every shock is Fréchet.
    frechet_scales: Option<Vec<f64>>,
}

impl ShockModel {
    pub fn new(shocks: Vec<Shock>, exposures: Vec<Vec<usize>>) -> Result<Self> {
        if exposures.len() < 2 {
            return domain("a shock model needs at least two components");
        }
        if shocks.is_empty() {
            return domain("a shock model needs at least one shock");
        }
        for s in &shocks {
            s.validate()?;
        }
        let mut exposed = vec![Vec::new(); shocks.len()];
        for (i, set) in exposures.iter().enumerate() {
            if set.is_empty() {
                return domain(format!("component {i} is exposed to no shock"));
            }
            for &j in set {
                if j >= shocks.len() {
                    return domain(format!("component {i} refers to missing shock {j}"));
                }
                if exposed[j].contains(&i) {
                    return domain(format!("component {i} lists shock {j} twice"));
                }
                exposed[j].push(i);
            }
        }
        if let Some(j) = exposed.iter().position(Vec::is_empty) {
            return domain(format!("shock {j} affects no component"));
        }
        let frechet_scales = shocks
            .iter()
            .map(|s| match *s {
                Shock::Frechet { scale } => Some(scale),
                Shock::Exponential { .. } => None,
            })
            .collect::<Option<Vec<f64>>>()
            .map(|s| exposures.iter().map(|set| set.iter().map(|&j| s[j]).sum()).collect());
        Ok(Self { shocks, exposures, exposed, frechet_scales })
    }

    /// Marshall-Olkin model with Fréchet shocks of the given scales.
    pub fn marshall_olkin(scales: &[f64], exposures: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(scales.iter().map(|&scale| Shock::Frechet { scale }).collect(), exposures)
    }

    pub fn dim(&self) -> usize {
        self.exposures.len()
    }

    pub fn shocks(&self) -> &[Shock] {
        &self.shocks
    }

    pub fn exposures(&self) -> &[Vec<usize>] {
        &self.exposures
    }

    pub fn component_cdf(&self, i: usize, x: f64) -> f64 {
        self.component_ln_cdf(i, x).exp()
    }

    fn component_ln_cdf(&self, i: usize, x: f64) -> f64 {
        self.exposures[i].iter().map(|&j| self.shocks[j].ln_cdf(x)).sum()
    }

    /// Inverse of the distribution function of component `i`.
    pub fn component_quantile(&self, i: usize, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        if u >= 1.0 {
            return Ok(f64::INFINITY);
        }
        if let Some(s) = &self.frechet_scales {
            return Ok(-s[i] / u.ln());
        }
        let set = &self.exposures[i];
        if set.len() == 1 {
            return Ok(self.shocks[set[0]].quantile(u));
        }
        let root_n = u.powf(1.0 / set.len() as f64);
        let lo = set.iter().map(|&j| self.shocks[j].quantile(u)).fold(0.0, f64::max);
        let hi = set.iter().map(|&j| self.shocks[j].quantile(root_n)).fold(0.0, f64::max);
        if !(hi.is_finite() && lo > 0.0) {
            return Err(Error::Domain(format!("component {i} quantile at {u} is not invertible")));
        }
        if hi <= lo {
            return Ok(lo);
        }
        let target = u.ln();
        let f = |x| self.component_ln_cdf(i, x) - target;
        // f(lo) <= 0 exactly; a positive value is rounding and lo is the root.
        if f(lo) >= 0.0 {
            return Ok(lo);
        }
        bracketed_root(f, lo, hi, 1e-12 * hi, 500)
    }

    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        if u.iter().any(|&x| x <= 0.0) {
            return Ok(0.0);
        }
        if let Some(s_hat) = &self.frechet_scales {
            // prod_j min_i u_i^{s_j / s_hat_i}
            let mut ln_c = 0.0;
            for (j, set) in self.exposed.iter().enumerate() {
                let Shock::Frechet { scale } = self.shocks[j] else { unreachable!() };
                ln_c += set
                    .iter()
                    .map(|&i| scale / s_hat[i] * u[i].ln())
                    .fold(0.0, f64::min);
            }
            return Ok(ln_c.exp());
        }
        let x: Vec<f64> = (0..self.dim())
            .map(|i| self.component_quantile(i, u[i]))
            .collect::<Result<_>>()?;
        let ln_c: f64 = self
            .exposed
            .iter()
            .enumerate()
            .map(|(j, set)| {
                let m = set.iter().map(|&i| x[i]).fold(f64::INFINITY, f64::min);
                if m.is_infinite() {
                    0.0
                } else {
                    self.shocks[j].ln_cdf(m)
                }
            })
            .sum();
        Ok(ln_c.exp())
    }

    /// Exponent `alpha` with `C(t, ..., t) = t^alpha`, present when every
    /// shock is Fréchet.
    pub fn diagonal_exponent(&self) -> Option<f64> {
        let s_hat = self.frechet_scales.as_ref()?;
        let alpha = self
            .exposed
            .iter()
            .enumerate()
            .map(|(j, set)| {
                let Shock::Frechet { scale } = self.shocks[j] else { unreachable!() };
                set.iter().map(|&i| scale / s_hat[i]).fold(0.0, f64::max)
            })
            .sum();
        Some(alpha)
    }

    fn shocks_to_uniforms(&self, z: &[f64], out: &mut [f64]) {
        for (i, set) in self.exposures.iter().enumerate() {
            let x = set.iter().map(|&j| z[j]).fold(0.0, f64::max);
            out[i] = self.component_cdf(i, x);
        }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let z: Vec<f64> = self.shocks.iter().map(|s| s.quantile(open01(rng))).collect();
        self.shocks_to_uniforms(&z, out);
    }

    /// Exceedance probabilities `p_j = P[Z_j > phi_j]` with
    /// `phi_j = min_{i exposed to j} F_{X_i}^{-1}(lambda)`.
    fn exceedance(&self, lambda: f64) -> Result<Vec<f64>> {
        let x: Vec<f64> = (0..self.dim())
            .map(|i| self.component_quantile(i, lambda))
            .collect::<Result<_>>()?;
        Ok(self
            .exposed
            .iter()
            .enumerate()
            .map(|(j, set)| {
                let phi = set.iter().map(|&i| x[i]).fold(f64::INFINITY, f64::min);
                1.0 - self.shocks[j].cdf(phi)
            })
            .collect())
    }

    /// One exact draw from the copula conditioned on `max_i U_i > lambda`.
    ///
    /// The exceedance indicators `B_j = 1{Z_j > phi_j}` are drawn one at a
    /// time conditionally on at least one being set, then each shock is
    /// drawn below or above its threshold accordingly.
    pub fn sample_exceeding<R: Rng + ?Sized>(&self, lambda: f64, rng: &mut R, out: &mut [f64]) -> Result<()> {
        let p = self.exceedance(lambda)?;
        if p.iter().all(|&pj| pj <= 0.0) {
            return Err(Error::DegenerateConditioning(format!(
                "no shock can exceed its threshold at lambda = {lambda}"
            )));
        }
        let tail = tail_exceedance(&p);
        let mut hit = false;
        let z: Vec<f64> = p
            .iter()
            .zip(&tail)
            .zip(&self.shocks)
            .map(|((&pk, &tk), shock)| {
                let pt = if hit { pk } else { (pk / tk).min(1.0) };
                let b = open01(rng) < pt;
                hit |= b;
                let v = open01(rng);
                if b {
                    shock.upper_quantile(pk * v)
                } else {
                    shock.quantile((1.0 - pk) * v)
                }
            })
            .collect();
        self.shocks_to_uniforms(&z, out);
        Ok(())
    }

    /// Draws the remaining components given `U_k = u`.
    ///
    /// `X_k = x` is attained by exactly one shock in `I_k`, chosen with
    /// probability proportional to its reverse hazard at `x`. The other
    /// shocks of `I_k` are then conditioned to lie below `x`; shocks not
    /// affecting component `k` are unconstrained.
    pub(crate) fn conditional_sample_into<R: Rng + ?Sized>(
        &self,
        k: usize,
        x: f64,
        rng: &mut R,
        out: &mut [f64],
    ) {
        let set = &self.exposures[k];
        let hazards: Vec<f64> = set.iter().map(|&j| self.shocks[j].reverse_hazard(x)).collect();
        let total: f64 = hazards.iter().sum();
        let mut pick = open01(rng) * total;
        let mut argmax = set[set.len() - 1];
        for (&j, &h) in set.iter().zip(&hazards) {
            if pick < h {
                argmax = j;
                break;
            }
            pick -= h;
        }
        let z: Vec<f64> = self
            .shocks
            .iter()
            .enumerate()
            .map(|(j, shock)| {
                if j == argmax {
                    x
                } else if set.contains(&j) {
                    shock.quantile(shock.cdf(x) * open01(rng))
                } else {
                    shock.quantile(open01(rng))
                }
            })
            .collect();
        let mut full = vec![0.0; self.dim()];
        self.shocks_to_uniforms(&z, &mut full);
        let mut it = out.iter_mut();
        for (i, &v) in full.iter().enumerate() {
            if i != k {
                *it.next().expect("output has d - 1 slots") = v;
            }
        }
    }
}

/// `1 - prod_{l >= k} (1 - p_l)` for every `k`.
fn tail_exceedance(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    let mut ln_stay = 0.0;
    for k in (0..p.len()).rev() {
        ln_stay += (-p[k]).ln_1p();
        out[k] = -ln_stay.exp_m1();
    }
    out
}
