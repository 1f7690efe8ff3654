//! Farlie-Gumbel-Morgenstern copula with a single parameter,
//! `C(u) = prod u_i (1 + theta prod (1 - u_i))`.

use super::archimedean::open01;
use crate::error::{domain, Result};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Fgm {
    theta: f64,
    dim: usize,
}

impl Fgm {
    pub fn new(theta: f64, dim: usize) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta) {
            return domain(format!("FGM parameter must lie in [-1, 1], got {theta}"));
        }
        Ok(Self { theta, dim })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn cdf(&self, u: &[f64]) -> f64 {
        let p: f64 = u.iter().product();
        let q: f64 = u.iter().map(|x| 1.0 - x).product();
        (p * (1.0 + self.theta * q)).clamp(0.0, 1.0)
    }

    pub(crate) fn diagonal(&self, t: f64) -> f64 {
        let d = self.dim as i32;
        t.powi(d) * (1.0 + self.theta * (1.0 - t).powi(d))
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        fill(self.theta, rng, out);
    }
}

/// Fills `out` with a draw from the FGM copula of dimension `out.len()`.
///
/// All but the last coordinate are independent uniforms; the last solves
/// the quadratic conditional distribution `v (1 + w (1 - v)) = q`.
pub(crate) fn fill<R: Rng + ?Sized>(theta: f64, rng: &mut R, out: &mut [f64]) {
    let n = out.len();
    let mut w = theta;
    for x in out[..n - 1].iter_mut() {
        *x = open01(rng);
        w *= 1.0 - 2.0 * *x;
    }
    out[n - 1] = last_quantile(w, open01(rng));
}

/// Inverse of `v -> v (1 + w (1 - v))` for `|w| <= 1`.
pub(crate) fn last_quantile(w: f64, q: f64) -> f64 {
    let b = 1.0 + w;
    let disc = (b * b - 4.0 * w * q).max(0.0);
    (2.0 * q / (b + disc.sqrt())).clamp(0.0, 1.0)
}

pub(crate) fn last_cdf(w: f64, v: f64) -> f64 {
    v * (1.0 + w * (1.0 - v))
}
