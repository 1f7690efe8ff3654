#![allow(dead_code)]

use copula_is::Copula;

/// Step of the central differences in the conditioning coordinate.
pub const FD_STEP: f64 = 1e-5;

/// `P[U_j <= v_j for (j, v_j) in free | U_k = u_k]` as the central
/// difference of the joint CDF in coordinate `k`, other coordinates at one.
pub fn fd_conditional_cdf(c: &Copula, k: usize, u_k: f64, free: &[(usize, f64)]) -> f64 {
    let d = c.dim();
    let eval = |x: f64| {
        let mut u = vec![1.0; d];
        u[k] = x;
        for &(j, v) in free {
            u[j] = v;
        }
        c.cdf(&u).unwrap()
    };
    ((eval(u_k + FD_STEP) - eval(u_k - FD_STEP)) / (2.0 * FD_STEP)).clamp(0.0, 1.0)
}

/// Kolmogorov distance between the sample on `[0, 1]` and `cdf`, taken
/// over a uniform grid of `grid` points. Values repeated in the sample are
/// treated as atoms: the empirical jump there is compared with `cdf` read
/// `side` to the left and right, and grid points closer than `side` to an
/// atom are skipped, since a difference-quotient oracle smears the jump.
pub fn ks_distance<F: Fn(f64) -> f64>(mut xs: Vec<f64>, cdf: F, grid: usize, side: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut atoms = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        if j - i > 1 {
            atoms.push((xs[i], i as f64 / n, j as f64 / n));
        }
        i = j;
    }
    let mut d = 0.0f64;
    for &(a, below, upto) in &atoms {
        d = d.max((cdf((a - side).max(0.0)) - below).abs());
        d = d.max((cdf((a + side).min(1.0)) - upto).abs());
    }
    for g in 1..grid {
        let v = g as f64 / grid as f64;
        if atoms.iter().any(|&(a, _, _)| (v - a).abs() < side) {
            continue;
        }
        let emp = xs.partition_point(|&x| x <= v) as f64 / n;
        d = d.max((cdf(v) - emp).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample KS statistic.
pub fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        p += 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
}

/// The copulas exercised at `d = 3`.
pub fn families_d3() -> Vec<(&'static str, Copula)> {
    use copula_is::ShockModel;
    let mo = ShockModel::marshall_olkin(&[1.0, 0.7, 1.3, 0.8], vec![vec![0, 3], vec![1, 3], vec![2, 3]]).unwrap();
    vec![
        ("independence", Copula::independence(3).unwrap()),
        ("clayton", Copula::clayton(2.0, 3).unwrap()),
        ("gumbel", Copula::gumbel(1.5, 3).unwrap()),
        ("frank", Copula::frank(5.0, 3).unwrap()),
        ("fgm", Copula::fgm(0.6, 3).unwrap()),
        ("shock", Copula::shock(mo)),
    ]
}
