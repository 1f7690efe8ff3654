//! Clayton, Gumbel and Frank copulas.
//!
//! All three are written through their generator `psi` with
//! `C(u) = psi(psi^{-1}(u_1) + ... + psi^{-1}(u_d))`. Conditioning on `m`
//! coordinates whose generator arguments sum to `s` gives the conditional
//! distribution function
//!
//! ```text
//! F(v | s, m) = psi^{(m)}(s + psi^{-1}(v)) / psi^{(m)}(s)
//! ```
//!
//! so each family exposes `ln |psi^{(m)}(t)|`. Sampling of the full copula
//! uses the frailty representation `U_i = psi(E_i / V)` with `E_i` standard
//! exponential and `V` the family's mixing variable.

use crate::error::{domain, Error, Result};
use crate::roots::bracketed_root;
use rand::Rng;
use rand::distr::Open01;
use rand_distr::{Distribution, Exp1, Gamma};
use std::f64::consts::PI;

const QUANTILE_XTOL: f64 = 1e-12;
const MAX_NEWTON: usize = 200;

#[inline]
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

#[inline]
pub(crate) fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Clayton copula, `psi(t) = (1 + t)^{-1/theta}`, `theta > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clayton {
    theta: f64,
    dim: usize,
    frailty: Gamma<f64>,
}

impl Clayton {
    pub fn new(theta: f64, dim: usize) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return domain(format!("Clayton parameter must be positive, got {theta}"));
        }
        let frailty = Gamma::new(1.0 / theta, 1.0)
            .map_err(|e| Error::Domain(format!("Clayton frailty: {e}")))?;
        Ok(Self { theta, dim, frailty })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub(crate) fn psi(&self, t: f64) -> f64 {
        (-(t.ln_1p()) / self.theta).exp()
    }

    /// `u^{-theta} - 1`, accurate for `u` near one.
    #[inline]
    pub(crate) fn psi_inv(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        (-self.theta * u.ln()).exp_m1()
    }

    pub(crate) fn ln_abs_derivative(&self, m: usize, t: f64) -> f64 {
        let inv = 1.0 / self.theta;
        let prefix: f64 = (0..m).map(|i| (inv + i as f64).ln()).sum();
        prefix - (inv + m as f64) * t.ln_1p()
    }

    pub(crate) fn cdf(&self, u: &[f64]) -> f64 {
        if u.iter().any(|&x| x <= 0.0) {
            return 0.0;
        }
        let s: f64 = u.iter().map(|&x| self.psi_inv(x)).sum();
        self.psi(s)
    }

    pub(crate) fn diagonal(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.psi(self.dim as f64 * self.psi_inv(t))
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let v = self.frailty.sample(rng);
        for x in out.iter_mut() {
            *x = self.psi(exp1(rng) / v);
        }
    }

    /// Increment of the generator sum for the coordinate with conditional
    /// probability `q`, given `m` conditioned coordinates summing to `s`.
    #[inline]
    pub(crate) fn conditional_increment(&self, s: f64, m: usize, q: f64) -> f64 {
        let shape = m as f64 + 1.0 / self.theta;
        (1.0 + s) * (-q.ln() / shape).exp_m1()
    }
}

/// Gumbel copula, `psi(t) = exp(-t^{1/theta})`, `theta >= 1`.
///
/// Derivatives follow `psi^{(m)}(t) = (-1)^m psi(t) Q_m(t)` with
/// `Q_{m+1} = a t^{a-1} Q_m - Q_m'` and `a = 1/theta`. Writing
/// `Q_m(t) = t^{-m} sum_k c_{m,k} t^{a k}` the coefficients obey
/// `c_{m+1,k} = (m - a k) c_{m,k} + a c_{m,k-1}`, all non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Gumbel {
    theta: f64,
    dim: usize,
    /// `coeffs[m][k - 1] = c_{m,k}` for `m = 0..=dim`.
    coeffs: Vec<Vec<f64>>,
}

impl Gumbel {
    pub fn new(theta: f64, dim: usize) -> Result<Self> {
        if !(theta >= 1.0 && theta.is_finite()) {
            return domain(format!("Gumbel parameter must be >= 1, got {theta}"));
        }
        let a = 1.0 / theta;
        let mut coeffs: Vec<Vec<f64>> = vec![Vec::new(), vec![a]];
        for m in 1..dim {
            let prev = &coeffs[m];
            let mut next = vec![0.0; m + 1];
            for (i, &c) in prev.iter().enumerate() {
                let k = (i + 1) as f64;
                next[i] += (m as f64 - a * k) * c;
                next[i + 1] += a * c;
            }
            coeffs.push(next);
        }
        Ok(Self { theta, dim, coeffs })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn a(&self) -> f64 {
        1.0 / self.theta
    }

    #[inline]
    pub(crate) fn psi(&self, t: f64) -> f64 {
        (-t.powf(self.a())).exp()
    }

    #[inline]
    pub(crate) fn psi_inv(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        (-u.ln()).powf(self.theta)
    }

    /// `ln Q_m(t)` for `t > 0`.
    fn ln_q(&self, m: usize, t: f64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let c = &self.coeffs[m];
        let lnw = self.a() * t.ln();
        let w = lnw.exp();
        // Horner in w (or 1/w for large w, factoring out w^m).
        let ln_poly = if w <= 1.0 {
            let mut acc = 0.0;
            for &ck in c.iter().rev() {
                acc = acc * w + ck;
            }
            (acc * w).ln()
        } else {
            let iw = 1.0 / w;
            let mut acc = 0.0;
            for &ck in c.iter() {
                acc = acc * iw + ck;
            }
            acc.ln() + m as f64 * lnw
        };
        ln_poly - m as f64 * t.ln()
    }

    pub(crate) fn ln_abs_derivative(&self, m: usize, t: f64) -> f64 {
        -t.powf(self.a()) + self.ln_q(m, t)
    }

    pub(crate) fn cdf(&self, u: &[f64]) -> f64 {
        if u.iter().any(|&x| x <= 0.0) {
            return 0.0;
        }
        let s: f64 = u.iter().map(|&x| self.psi_inv(x)).sum();
        self.psi(s)
    }

    pub(crate) fn diagonal(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        t.powf(self.diagonal_exponent())
    }

    pub(crate) fn diagonal_exponent(&self) -> f64 {
        (self.dim as f64).powf(self.a())
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        if self.theta == 1.0 {
            for x in out.iter_mut() {
                *x = open01(rng);
            }
            return;
        }
        let v = positive_stable(self.a(), rng);
        for x in out.iter_mut() {
            *x = self.psi(exp1(rng) / v);
        }
    }

    /// Solves `F(v | s, m) = q` for the generator increment `x = psi^{-1}(v)`.
    ///
    /// Newton's method on `ln F`, whose derivative `-Q_{m+1}/Q_m` comes from
    /// the same recursion, safeguarded by bisection on a maintained bracket.
    pub(crate) fn conditional_increment(&self, s: f64, m: usize, q: f64) -> Result<f64> {
        debug_assert!(m >= 1 && m < self.coeffs.len());
        let a = self.a();
        let ln_q_target = q.ln();
        let base = if s > 0.0 { self.ln_abs_derivative(m, s) } else { f64::INFINITY };
        if !base.is_finite() {
            return Err(Error::DegenerateConditioning(format!(
                "Gumbel conditioning sum {s} is not in (0, inf)"
            )));
        }
        let h = |x: f64| self.ln_abs_derivative(m, s + x) - base - ln_q_target;
        let slope = |x: f64| {
            let t = s + x;
            -(self.ln_q(m + 1, t) - self.ln_q(m, t)).exp()
        };

        let s_a = s.powf(a);
        let mut x = ((s_a - ln_q_target).powf(self.theta) - s).max(0.0);
        let mut lo = 0.0;
        let mut hi = f64::INFINITY;
        if x <= 0.0 {
            x = s.max(1e-300) * 1e-6;
        }
        let mut hx = h(x);
        let mut iterations = 0;
        while iterations < MAX_NEWTON {
            iterations += 1;
            if !hx.is_finite() {
                hi = x;
                x = 0.5 * (lo + x);
                hx = h(x);
                continue;
            }
            // ln F already matches ln q to rounding.
            if hx.abs() <= 8.0 * f64::EPSILON * (1.0 + ln_q_target.abs()) {
                return Ok(x);
            }
            if hx > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = hx / slope(x);
            let mut next = x - step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(lo) + 1e-300 };
            }
            if (next - x).abs() <= QUANTILE_XTOL * x.abs() + f64::MIN_POSITIVE {
                return Ok(next);
            }
            if hi.is_finite() && hi - lo <= QUANTILE_XTOL * hi {
                return Ok(0.5 * (lo + hi));
            }
            x = next;
            hx = h(x);
        }
        Err(Error::InversionFailed { iterations, residual: hx.abs() })
    }
}

/// Frank copula, `psi(t) = -ln(1 - (1 - e^{-alpha}) e^{-t}) / alpha`.
///
/// `alpha > 0` in any dimension; `alpha < 0` only for `d = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frank {
    alpha: f64,
    dim: usize,
    /// `1 - e^{-alpha}`.
    c: f64,
    /// `eulerian[n][k] = k! S(n + 1, k + 1)`, giving
    /// `Li_{-n}(z) = sum_k eulerian[n][k] y^{k+1}` with `y = z / (1 - z)`.
    eulerian: Vec<Vec<f64>>,
}

impl Frank {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 {
            return domain(format!("Frank parameter must be finite and non-zero, got {alpha}"));
        }
        if alpha < 0.0 && dim > 2 {
            return domain(format!(
                "Frank parameter {alpha} < 0 is only a copula for d = 2 (got d = {dim})"
            ));
        }
        // Stirling numbers of the second kind up to S(dim, .).
        let n_max = dim;
        let mut stirling = vec![vec![0.0f64; n_max + 2]; n_max + 2];
        stirling[0][0] = 1.0;
        for n in 1..=n_max + 1 {
            for k in 1..=n {
                stirling[n][k] = k as f64 * stirling[n - 1][k] + stirling[n - 1][k - 1];
            }
        }
        let eulerian = (0..n_max)
            .map(|n| {
                let mut fact = 1.0;
                (0..=n)
                    .map(|k| {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        fact * stirling[n + 1][k + 1]
                    })
                    .collect()
            })
            .collect();
        Ok(Self { alpha, dim, c: -(-alpha).exp_m1(), eulerian })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub(crate) fn psi(&self, t: f64) -> f64 {
        -(-self.c * (-t).exp()).ln_1p() / self.alpha
    }

    #[inline]
    pub(crate) fn psi_inv(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        -((-self.alpha * u).exp_m1() / (-self.alpha).exp_m1()).ln()
    }

    pub(crate) fn ln_abs_derivative(&self, m: usize, t: f64) -> f64 {
        debug_assert!(m >= 1);
        let z = self.c * (-t).exp();
        let y = z / (1.0 - z);
        let coeffs = &self.eulerian[m - 1];
        let mut acc = 0.0;
        for &ck in coeffs.iter().rev() {
            acc = acc * y + ck;
        }
        (acc * y).abs().ln() - self.alpha.abs().ln()
    }

    pub(crate) fn cdf(&self, u: &[f64]) -> f64 {
        if u.iter().any(|&x| x <= 0.0) {
            return 0.0;
        }
        let denom = (-self.alpha).exp_m1();
        let mut prod = 1.0;
        for (i, &x) in u.iter().enumerate() {
            prod *= (-self.alpha * x).exp_m1();
            if i > 0 {
                prod /= denom;
            }
        }
        (-(prod.ln_1p()) / self.alpha).clamp(0.0, 1.0)
    }

    pub(crate) fn diagonal(&self, t: f64) -> f64 {
        let u = vec![t; self.dim];
        self.cdf(&u)
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        if self.alpha > 0.0 {
            let v = logarithmic_series(self.c, rng) as f64;
            for x in out.iter_mut() {
                *x = self.psi(exp1(rng) / v);
            }
        } else {
            out[0] = open01(rng);
            out[1] = self.single_conditional_quantile(out[0], open01(rng));
        }
    }

    /// Parameter `1 - e^{-alpha u_k}` of the Ali-Mikhail-Haq copula of the
    /// conditional law given one coordinate equal to `u_k`.
    pub(crate) fn amh_parameter(&self, u_k: f64) -> f64 {
        -(-self.alpha * u_k).exp_m1()
    }

    /// Quantile of one coordinate given a single coordinate equal to `u_k`.
    pub(crate) fn single_conditional_quantile(&self, u_k: f64, q: f64) -> f64 {
        let ratio = (-self.alpha).exp_m1() / (1.0 + (-self.alpha * u_k).exp() * (1.0 / q - 1.0));
        (-(ratio.ln_1p()) / self.alpha).clamp(0.0, 1.0)
    }

    /// Distribution function of one coordinate given a single coordinate equal to `u_k`.
    pub(crate) fn single_conditional_cdf(&self, u_k: f64, v: f64) -> f64 {
        let a = (-self.alpha * u_k).exp();
        let bu = (-self.alpha * u_k).exp_m1();
        let bv = (-self.alpha * v).exp_m1();
        let c = (-self.alpha).exp_m1();
        a * bv / (c + bu * bv)
    }

    /// Draws from the conditional law given coordinate `u_k` through the
    /// Ali-Mikhail-Haq copula and the conditional margin quantile.
    pub(crate) fn conditional_sample_into<R: Rng + ?Sized>(&self, u_k: f64, rng: &mut R, out: &mut [f64]) {
        let theta = self.amh_parameter(u_k);
        if out.len() == 1 || theta <= 0.0 {
            for x in out.iter_mut() {
                *x = self.single_conditional_quantile(u_k, open01(rng));
            }
            return;
        }
        let v = 1.0 + (open01(rng).ln() / theta.ln()).floor();
        for x in out.iter_mut() {
            let w = (1.0 - theta) / ((exp1(rng) / v).exp() - theta);
            *x = self.single_conditional_quantile(u_k, w.clamp(f64::MIN_POSITIVE, 1.0));
        }
    }

}

/// Positive stable variable with Laplace transform `exp(-t^a)`, `0 < a < 1`
/// (Kanter's representation).
pub(crate) fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u = PI * open01(rng);
    let e = exp1(rng);
    let ln_s = (a * u).sin().ln() - u.sin().ln() / a
        + (1.0 - a) / a * (((1.0 - a) * u).sin().ln() - e.ln());
    ln_s.exp()
}

/// Logarithmic series variable, `P[V = k] = -p^k / (k ln(1 - p))`
/// (Kemp's LK algorithm).
pub(crate) fn logarithmic_series<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    let v = open01(rng);
    if v >= p {
        return 1;
    }
    let h = (-p).ln_1p();
    let q = -(h * open01(rng)).exp_m1();
    if v <= q * q {
        let k = 1.0 + (v.ln() / q.ln()).floor();
        return if k.is_finite() && k >= 1.0 { k as u64 } else { 1 };
    }
    if v <= q {
        2
    } else {
        1
    }
}

/// Generic inversion of an Archimedean conditional distribution given
/// `m` conditioned generator arguments summing to `s`.
pub(crate) fn invert_conditional<F, G>(ln_deriv: F, psi_inv: G, s: f64, m: usize, q: f64) -> Result<f64>
where
    F: Fn(usize, f64) -> f64,
    G: Fn(f64) -> f64,
{
    let base = ln_deriv(m, s);
    let cdf = |v: f64| -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        (ln_deriv(m, s + psi_inv(v)) - base).exp()
    };
    bracketed_root(|v| cdf(v) - q, 0.0, 1.0, 1e-14, 400)
}
