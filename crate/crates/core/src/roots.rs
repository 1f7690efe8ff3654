//! Bracketed scalar root finding and the standard normal quantile.

use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

const BISECTION_STEPS: usize = 12;

/// Finds a root of `f` inside `[lo, hi]`, which must bracket a sign change.
///
/// A fixed number of bisection steps shrinks the bracket first, then an
/// Illinois-modified secant iteration polishes the root while keeping it
/// bracketed. Iteration stops once successive iterates move less than `xtol`.
pub(crate) fn bracketed_root<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Domain(format!(
            "root not bracketed on [{lo}, {hi}] (f = {fa}, {fb})"
        )));
    }

    let mut iterations = 0;
    for _ in 0..BISECTION_STEPS {
        if b - a < xtol {
            return Ok(0.5 * (a + b));
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }

    // Illinois: the endpoint retained twice in a row has its value halved.
    let mut side = 0i8;
    let mut x_prev = f64::NAN;
    let mut residual = fa.abs().min(fb.abs());
    while iterations < max_iter {
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        iterations += 1;
        residual = fx.abs();
        if fx == 0.0 || (x - x_prev).abs() < xtol || b - a < xtol {
            return Ok(x);
        }
        x_prev = x;
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::InversionFailed { iterations, residual })
}

/// Standard normal quantile, polished with one Newton step on the tail
/// probability that does not suffer cancellation.
pub(crate) fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = Normal::standard().inverse_cdf(p);
    if !x.is_finite() {
        return x;
    }
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density == 0.0 {
        return x;
    }
    let residual = if p > 0.5 {
        (1.0 - p) - 0.5 * erfc(x / std::f64::consts::SQRT_2)
    } else {
        0.5 * erfc(-x / std::f64::consts::SQRT_2) - p
    };
    x - residual / density
}

/// Standard normal CDF.
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}
