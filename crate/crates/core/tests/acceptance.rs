//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! Runs as a plain binary so that every line reaches the test log. A
//! criterion listed in `EXPECTED_FAILURES` is still evaluated and printed as
//! FAIL; it fails the process if it passes or if it fails outside its known
//! shortfall.

mod common;

use common::{families_d3, fd_conditional_cdf, ks_distance, ks_p_value, ks_two_sample};
use copula_is::calibration::{
    calibrate_discrete_direct, calibrate_discrete_rejection, ensure_atom, rare_event_second_moment,
    DiscreteGrid,
};
use copula_is::estimators::{EstimatorKind, Functional};
use copula_is::harness::config::{Algorithm, ExperimentConfig, FunctionalSpec, Target};
use copula_is::harness::{run_experiment, Experiment, ExperimentReport};
use copula_is::rng::seeded;
use copula_is::{
    case_study_margins, Copula, DirectSampler, Family, Margin, MixingDistribution, RejectionProposal, RejectionSampler, Sampler,
    ShockModel,
};
use rand::Rng;
use std::time::Instant;

// Criterion 1.
const WEIGHT_TOL: f64 = 5e-4;
const SUM_TOL: f64 = 1e-12;
const CALIBRATION_SECONDS: f64 = 1.0;
// Criterion 2.
const WAITING_REL_TOL: f64 = 0.01;
const DRAWS_REL_TOL: f64 = 0.03;
const DRAWS_N: usize = 100_000;
// Criterion 3.
const UNBIASED_IS_N: usize = 100_000;
const UNBIASED_MC_N: usize = 1_000_000;
const UNBIASED_SE: f64 = 3.0;
// Criterion 4.
const REFERENCE_N: usize = 100_000;
const REFERENCE_REL_TOL: f64 = 0.05;
// Criterion 5.
const REDUCTION_REPS: usize = 200;
const REDUCTION_N: usize = 10_000;
const HEADLINE_MIN: f64 = 20.0;
const CELL_MIN: f64 = 4.0;
const CELL_PUBLISHED_CUTOFF: f64 = 8.0;
// Criterion 6.
const KS_N: usize = 20_000;
const KS_MAX: f64 = 0.02;
const KS_P_MIN: f64 = 0.01;
const SHOCK_LAMBDA: f64 = 0.9;
// Criterion 7.
const BOUND_REL: f64 = 1e-12;
const SANDWICH_MIXES: usize = 100;
const ENDPOINT_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;
const IDENTITY_TRIPLES: usize = 20;

/// Criteria known not to hold in their stated form.
///
/// 5: the last-component allocation for Clayton d=25 stays near a factor of
/// 3 over 1000 repetitions, below the band; every other cell must pass.
/// 7: the second-moment identity misses the probability mass of the top cell
/// `[x_n, 1]` and the inflation from the floor on the zero atom; the exact
/// value for the calibrated mix is `p^2 / (f p + 1 - f)`. Every other check
/// must pass.
const EXPECTED_FAILURES: &[usize] = &[5, 7];
/// Cells of criterion 5 allowed to fall short of the band.
const KNOWN_SHORT_CELLS: &[(Family, usize, &str)] = &[(Family::Clayton, 25, "alloc_xd")];

const SEED: u64 = 20_240_917;

struct Outcome {
    passed: bool,
    /// Failed only in the documented way.
    known_shortfall: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, known_shortfall: false, detail: detail.into() }
}

fn gumbel(d: usize) -> Copula {
    Copula::gumbel(1.5, d).unwrap()
}

fn clayton(d: usize) -> Copula {
    Copula::clayton(1.0, d).unwrap()
}

fn stop_loss(d: usize) -> Functional {
    Functional::stop_loss(1e5 * d as f64, case_study_margins(d))
}

fn case_mix(c: &Copula, d: usize) -> MixingDistribution {
    let f = stop_loss(d);
    calibrate_discrete_rejection(|t| f.on_diagonal(t).unwrap(), c, &DiscreteGrid::default()).unwrap()
}

fn probs(mix: &MixingDistribution) -> Vec<f64> {
    match mix {
        MixingDistribution::Discrete { probs, .. } => probs.clone(),
        _ => unreachable!("discrete calibration"),
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    // Published rows; the d = 2 entry p_9 = 0.787 is presumed misprinted.
    let table: [(usize, [f64; 10], &[usize]); 3] = [
        (2, [0.100, 0.000, 0.000, 0.000, 0.115, 0.325, 0.206, 0.128, 0.787, 0.048], &[8]),
        (5, [0.100, 0.000, 0.000, 0.000, 0.129, 0.302, 0.202, 0.131, 0.084, 0.053], &[]),
        (25, [0.100, 0.000, 0.000, 0.000, 0.022, 0.252, 0.216, 0.174, 0.135, 0.102], &[]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, want, skip) in table {
        let got = probs(&case_mix(&gumbel(d), d));
        let worst = (0..10).filter(|k| !skip.contains(k)).map(|k| (got[k] - want[k]).abs()).fold(0.0, f64::max);
        let sum: f64 = got.iter().sum();
        ok &= worst <= WEIGHT_TOL && (sum - 1.0).abs() <= SUM_TOL;
        parts.push(format!("d={d} max|diff|={worst:.2e} sum-1={:.1e}", sum - 1.0));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < CALIBRATION_SECONDS;
    outcome(ok, format!("{}; {secs:.3}s", parts.join(", ")))
}

fn criterion_2() -> Outcome {
    let cells = [
        ("gumbel", 2, 54.69),
        ("gumbel", 5, 31.11),
        ("gumbel", 25, 15.83),
        ("clayton", 2, 44.16),
        ("clayton", 5, 19.48),
        ("clayton", 25, 6.89),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, want) in cells {
        let c = if name == "gumbel" { gumbel(d) } else { clayton(d) };
        let sampler = RejectionSampler::new(&c, case_mix(&c, d)).unwrap();
        let expected = sampler.expected_draws();
        let mut rng = seeded(SEED + d as u64);
        let mut v = vec![0.0; d];
        let total: u64 = (0..DRAWS_N).map(|_| sampler.sample_into(&mut rng, &mut v).unwrap().draws_used).sum();
        let empirical = total as f64 / DRAWS_N as f64;
        let rel_analytic = expected / want - 1.0;
        let rel_empirical = empirical / expected - 1.0;
        ok &= rel_analytic.abs() <= WAITING_REL_TOL && rel_empirical.abs() <= DRAWS_REL_TOL;
        parts.push(format!("{name} d={d} E[N]={expected:.2} ({:+.2}%) mean={empirical:.2} ({:+.2}%)", 100.0 * rel_analytic, 100.0 * rel_empirical));
    }
    outcome(ok, parts.join("; "))
}

fn config(family: Family, parameter: f64, d: usize, functionals: Vec<FunctionalSpec>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::case_study(family, parameter, d, SEED);
    cfg.functionals = functionals;
    cfg
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (family, parameter) in [(Family::Clayton, 1.0), (Family::Gumbel, 1.5)] {
        for d in [2, 5] {
            let mut cfg = config(family, parameter, d, vec![FunctionalSpec::new("stop_loss", Target::StopLoss { threshold: None })]);
            cfg.mean_estimator = EstimatorKind::IsRaw;
            cfg.n = UNBIASED_MC_N;
            cfg.algorithms = vec![Algorithm::Mc];
            let mc = Experiment::prepare(&cfg).unwrap().repetition(Algorithm::Mc, 0).unwrap();
            cfg.n = UNBIASED_IS_N;
            cfg.algorithms = vec![Algorithm::Rejection, Algorithm::Direct];
            let exp = Experiment::prepare(&cfg).unwrap();
            for alg in [Algorithm::Rejection, Algorithm::Direct] {
                let is = exp.repetition(alg, 0).unwrap();
                let se = (is.ses[0].unwrap().powi(2) + mc.ses[0].unwrap().powi(2)).sqrt();
                let z = (is.estimates[0] - mc.estimates[0]) / se;
                ok &= z.abs() <= UNBIASED_SE;
                parts.push(format!("{family:?} d={d} {alg} z={z:+.2}"));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

fn criterion_4() -> Outcome {
    let cells = [
        (Family::Gumbel, 1.5, 2, "stop_loss", 10_498.0),
        (Family::Gumbel, 1.5, 2, "var_0.995", 645_162.0),
        (Family::Clayton, 1.0, 5, "es_0.99", 1_272_925.0),
        (Family::Gumbel, 1.5, 2, "alloc_x1", 351_077.0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (family, parameter, d, name, want) in cells {
        let mut cfg = ExperimentConfig::case_study(family, parameter, d, SEED);
        cfg.n = REFERENCE_N;
        cfg.algorithms = vec![Algorithm::Rejection, Algorithm::Direct];
        let i = cfg.functionals.iter().position(|f| f.name() == name).unwrap();
        let exp = Experiment::prepare(&cfg).unwrap();
        for alg in [Algorithm::Rejection, Algorithm::Direct] {
            let got = exp.repetition(alg, 0).unwrap().estimates[i];
            let rel = got / want - 1.0;
            ok &= rel.abs() <= REFERENCE_REL_TOL;
            parts.push(format!("{family:?} d={d} {name} {alg} {got:.0} ({:+.2}%)", 100.0 * rel));
        }
    }
    outcome(ok, parts.join("; "))
}

/// Published reduction factors, rejection then direct, in the order
/// stop_loss, var_0.995, es_0.99, alloc_x1, alloc_xd.
fn published_factors(family: Family, d: usize) -> [[f64; 5]; 2] {
    match (family, d) {
        (Family::Gumbel, 2) => [[80.8, 12.4, 18.6, 21.4, 22.3], [116.03, 14.25, 20.98, 23.84, 23.87]],
        (Family::Gumbel, 5) => [[39.1, 11.5, 17.5, 19.3, 18.1], [80.27, 15.83, 19.78, 19.01, 20.67]],
        (Family::Gumbel, 25) => [[17.3, 9.9, 13.9, 11.3, 17.7], [21.71, 8.97, 12.14, 11.85, 19.52]],
        (Family::Clayton, 2) => [[63.08, 14.14, 19.74, 31.18, 26.04], [72.17, 14.74, 20.18, 31.41, 25.57]],
        (Family::Clayton, 5) => [[23.59, 10.60, 14.84, 19.18, 16.92], [22.34, 11.05, 12.60, 14.93, 14.84]],
        (Family::Clayton, 25) => [[9.05, 6.05, 8.47, 5.62, 15.81], [5.82, 6.33, 5.23, 10.55, 10.98]],
        _ => unreachable!(),
    }
}

fn criterion_5() -> Outcome {
    let names = ["stop_loss", "var_0.995", "es_0.99", "alloc_x1", "alloc_xd"];
    let mut ok = true;
    let mut unknown_low = false;
    let mut low = Vec::new();
    let mut headline = String::new();
    let mut checked = 0;
    for (family, parameter) in [(Family::Gumbel, 1.5), (Family::Clayton, 1.0)] {
        for d in [2, 5, 25] {
            let mut cfg = ExperimentConfig::case_study(family, parameter, d, SEED);
            cfg.reps = REDUCTION_REPS;
            cfg.n = REDUCTION_N;
            let report: ExperimentReport = run_experiment(&cfg).unwrap();
            let published = published_factors(family, d);
            for (a, alg) in [Algorithm::Rejection, Algorithm::Direct].into_iter().enumerate() {
                for (i, name) in names.iter().enumerate() {
                    let got = report.reduction_factor(name, alg).unwrap_or(0.0);
                    if family == Family::Gumbel && d == 2 && *name == "stop_loss" {
                        ok &= got >= HEADLINE_MIN;
                        unknown_low |= got < HEADLINE_MIN;
                        headline.push_str(&format!("{alg} {got:.1} (published {}) ", published[a][i]));
                    }
                    if published[a][i] >= CELL_PUBLISHED_CUTOFF {
                        checked += 1;
                        if got < CELL_MIN {
                            ok = false;
                            unknown_low |= !KNOWN_SHORT_CELLS.contains(&(family, d, *name));
                            low.push(format!("{family:?} d={d} {alg} {name} {got:.2} (published {})", published[a][i]));
                        }
                    }
                }
            }
        }
    }
    let detail = format!(
        "Gumbel d=2 stop-loss: {}; {checked} cells with published factor >= {CELL_PUBLISHED_CUTOFF}, below {CELL_MIN}: {}",
        headline.trim_end(),
        if low.is_empty() { "none".to_string() } else { low.join(", ") }
    );
    Outcome { passed: ok, known_shortfall: !ok && !unknown_low, detail }
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c) in families_d3() {
        let mut worst = 0.0f64;
        for (k, u_k) in [(0, 0.3), (2, 0.9)] {
            let ctx = c.conditional(k, u_k).unwrap();
            let mut rng = seeded(SEED + k as u64);
            let draws: Vec<Vec<f64>> = (0..KS_N).map(|_| ctx.sample(&mut rng).unwrap()).collect();
            for (slot, j) in (0..3).filter(|&j| j != k).enumerate() {
                let xs = draws.iter().map(|v| v[slot]).collect();
                let ks = ks_distance(xs, |v| fd_conditional_cdf(&c, k, u_k, &[(j, v)]), 2000, 2e-4);
                worst = worst.max(ks);
            }
        }
        ok &= worst < KS_MAX;
        parts.push(format!("{name} KS={worst:.4}"));
    }

    let mo = ShockModel::marshall_olkin(&[1.0, 0.7, 1.3, 0.8], vec![vec![0, 3], vec![1, 3], vec![2, 3]]).unwrap();
    let c = Copula::shock(mo.clone());
    let mut rng = seeded(SEED ^ 0x5eed);
    let mut v = vec![0.0; 3];
    let mut exact = vec![Vec::with_capacity(KS_N); 4];
    let mut rejected = vec![Vec::with_capacity(KS_N); 4];
    for _ in 0..KS_N {
        mo.sample_exceeding(SHOCK_LAMBDA, &mut rng, &mut v).unwrap();
        for j in 0..3 {
            exact[j].push(v[j]);
        }
        exact[3].push(v.iter().copied().fold(0.0, f64::max));
        loop {
            c.sample_into(&mut rng, &mut v);
            if v.iter().any(|&x| x > SHOCK_LAMBDA) {
                break;
            }
        }
        for j in 0..3 {
            rejected[j].push(v[j]);
        }
        rejected[3].push(v.iter().copied().fold(0.0, f64::max));
    }
    let p_min = exact
        .into_iter()
        .zip(rejected)
        .map(|(a, b)| ks_p_value(ks_two_sample(a, b), KS_N, KS_N))
        .fold(1.0, f64::min);
    ok &= p_min > KS_P_MIN;
    parts.push(format!("shock exceedance vs rejection min p={p_min:.3}"));
    outcome(ok, parts.join(", "))
}

fn random_discrete<R: Rng>(rng: &mut R, n_atoms: usize, p0_min: f64) -> MixingDistribution {
    let mut atoms: Vec<f64> = (1..n_atoms).map(|_| 0.999 * rng.random::<f64>()).collect();
    atoms.push(0.0);
    atoms.sort_by(f64::total_cmp);
    atoms.dedup();
    let mut probs: Vec<f64> = atoms.iter().map(|_| rng.random::<f64>()).collect();
    let rest: f64 = probs[1..].iter().sum();
    let p0 = p0_min + (1.0 - p0_min) * rng.random::<f64>();
    for p in probs[1..].iter_mut() {
        *p *= (1.0 - p0) / rest;
    }
    probs[0] = p0;
    MixingDistribution::discrete(atoms, probs).unwrap()
}

fn random_copula<R: Rng>(rng: &mut R) -> Copula {
    let d = rng.random_range(2..7);
    match rng.random_range(0..4) {
        0 => Copula::clayton(0.2 + 4.0 * rng.random::<f64>(), d).unwrap(),
        1 => Copula::gumbel(1.0 + 3.0 * rng.random::<f64>(), d).unwrap(),
        2 => Copula::frank(0.5 + 8.0 * rng.random::<f64>(), d).unwrap(),
        _ => {
            let scales: Vec<f64> = (0..=d).map(|_| 0.2 + rng.random::<f64>()).collect();
            let exposures = (0..d).map(|i| vec![i, d]).collect();
            Copula::shock(ShockModel::marshall_olkin(&scales, exposures).unwrap())
        }
    }
}

fn criterion_7() -> (Outcome, String) {
    let mut rng = seeded(SEED + 7);
    let mut notes = Vec::new();

    // Weight bound on every draw, calibrated and continuous mixes.
    let margins = vec![Margin::pareto(1.0, 3.0).unwrap(); 3];
    let f = Functional::stop_loss(10.0, margins);
    let psi = |t: f64| f.on_diagonal(t).unwrap();
    let mut bound_ok = true;
    let mut drawn = 0;
    for (_, c) in families_d3() {
        let grid = DiscreteGrid::default();
        let samplers: Vec<(Box<dyn Sampler>, f64)> = vec![
            (Box::new(RejectionSampler::new(&c, calibrate_discrete_rejection(psi, &c, &grid).unwrap()).unwrap()), grid.zero_floor),
            (Box::new(DirectSampler::new(&c, calibrate_discrete_direct(psi, &grid).unwrap()).unwrap()), grid.zero_floor),
            (Box::new(DirectSampler::new(&c, MixingDistribution::continuous_direct(3.0, 0.8).unwrap()).unwrap()), 0.2),
        ];
        for (s, p0) in &samplers {
            for _ in 0..5000 {
                let w = s.sample(&mut rng).unwrap().weight;
                bound_ok &= w <= (1.0 + BOUND_REL) / p0;
                drawn += 1;
            }
        }
    }
    notes.push(format!("weight bound on {drawn} draws: {}", if bound_ok { "ok" } else { "violated" }));

    // Waiting-time sandwich.
    let mut sandwich_ok = true;
    for _ in 0..SANDWICH_MIXES {
        let c = random_copula(&mut rng);
        let n_atoms = rng.random_range(2..12);
        let mix = random_discrete(&mut rng, n_atoms, 0.05);
        let inv_gap = mix.expected_inverse_gap().unwrap();
        let en = RejectionProposal::new(mix, &c).unwrap().expected_draws();
        let d = c.dim() as f64;
        sandwich_ok &= inv_gap / d <= en * (1.0 + BOUND_REL) && en <= inv_gap * (1.0 + BOUND_REL);
    }
    notes.push(format!("sandwich on {SANDWICH_MIXES} mixes: {}", if sandwich_ok { "ok" } else { "violated" }));

    // Continuous endpoints.
    let mut endpoint_ok = true;
    for _ in 0..50 {
        let c = if rng.random::<bool>() { Copula::gumbel(1.0 + 3.0 * rng.random::<f64>(), rng.random_range(2..10)).unwrap() } else { Copula::independence(rng.random_range(2..10)).unwrap() };
        let alpha = c.diagonal_exponent().unwrap();
        let beta = 1.05 + 10.0 * rng.random::<f64>();
        let gamma = 0.99 * rng.random::<f64>();
        let prop = RejectionProposal::new(MixingDistribution::continuous_rejection(alpha, beta, gamma).unwrap(), &c).unwrap();
        let w0 = prop.weight_at(0.0);
        let w1 = prop.weight_at(1.0);
        endpoint_ok &= (w0 * (1.0 - gamma) - 1.0).abs() <= ENDPOINT_TOL && (w1 * prop.expected_draws() - 1.0).abs() <= ENDPOINT_TOL;
    }
    notes.push(format!("continuous endpoints: {}", if endpoint_ok { "ok" } else { "violated" }));

    // Second-moment identity for the exceedance indicator.
    let mut identity_fail = 0;
    let mut inequality_fail = 0;
    let mut corrected_ok = true;
    let mut worst_gap = 0.0f64;
    for t in 0..IDENTITY_TRIPLES {
        let d = rng.random_range(2..7);
        let c = match t % 3 {
            0 => Copula::clayton(0.2 + 4.0 * rng.random::<f64>(), d).unwrap(),
            1 => Copula::gumbel(1.0 + 3.0 * rng.random::<f64>(), d).unwrap(),
            _ => Copula::frank(0.5 + 8.0 * rng.random::<f64>(), d).unwrap(),
        };
        let s = 0.5 + 0.49 * rng.random::<f64>();
        let floor = 0.01 + 0.3 * rng.random::<f64>();
        let base = random_discrete(&mut rng, 8, floor);
        let with_s = ensure_atom(&base, s, 0.05 + 0.3 * rng.random::<f64>()).unwrap();
        let mix = if t % 2 == 0 {
            with_s
        } else {
            // Calibrated to the indicator itself: all non-zero mass sits on `s`.
            let MixingDistribution::Discrete { atoms, .. } = &with_s else { unreachable!() };
            let grid_atoms = atoms.clone();
            let raw: Vec<f64> = grid_atoms.iter().map(|&x| if x == s { 1.0 - c.diagonal(x) } else { 0.0 }).collect();
            let total: f64 = raw.iter().sum();
            let mut probs: Vec<f64> = raw.iter().map(|r| (1.0 - floor) * r / total).collect();
            probs[0] = floor;
            MixingDistribution::discrete(grid_atoms, probs).unwrap()
        };
        let MixingDistribution::Discrete { atoms, probs } = &mix else { unreachable!() };
        let p_s_mass = probs[atoms.iter().position(|&x| x == s).unwrap()];
        assert!(p_s_mass > 0.0);
        let x_top = *atoms.last().unwrap();
        let prop = RejectionProposal::new(mix.clone(), &c).unwrap();
        let lhs = rare_event_second_moment(&prop, &c, s).unwrap();
        let p = 1.0 - c.diagonal(s);
        let rhs = (c.diagonal(x_top) - c.diagonal(s)) * p;
        let gap = (lhs - rhs).abs();
        worst_gap = worst_gap.max(gap);
        if gap > IDENTITY_TOL {
            identity_fail += 1;
        }
        if lhs > p * p + IDENTITY_TOL {
            inequality_fail += 1;
        }
        corrected_ok &= lhs <= p * p / p_s_mass * (1.0 + BOUND_REL);
    }
    notes.push(format!(
        "second-moment identity fails on {identity_fail}/{IDENTITY_TRIPLES} (max gap {worst_gap:.2e}), bound p^2 fails on {inequality_fail}/{IDENTITY_TRIPLES}"
    ));
    let corrected = format!("corrected bound p^2 / P[Lambda = s] holds on all: {corrected_ok}");
    let passed = bound_ok && sandwich_ok && endpoint_ok && identity_fail == 0 && inequality_fail == 0;
    let known_shortfall = !passed && bound_ok && sandwich_ok && endpoint_ok && corrected_ok;
    (Outcome { passed, known_shortfall, detail: notes.join("; ") }, corrected)
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let shock = r#"
seed = 5
reps = 12
n = 1500
[copula]
family = "shock"
shocks = [{ family = "frechet", scale = 1.0 }, { family = "exponential", rate = 0.5 }, { family = "frechet", scale = 2.0 }]
exposures = [[0, 1], [1, 2], [0, 2]]
[margins]
list = [{ family = "pareto", scale = 1.0, shape = 3.0 }, { family = "lognormal", mu = 0.0, sigma = 1.0 }, { family = "pareto", scale = 2.0, shape = 2.5 }]
[[functionals]]
target = "stop_loss"
threshold = 12.0
[[functionals]]
target = "es"
alpha = 0.99
"#;
    let mut gumbel_cfg = ExperimentConfig::case_study(Family::Gumbel, 1.5, 5, SEED);
    gumbel_cfg.reps = 16;
    gumbel_cfg.n = 2000;
    for (label, mut cfg) in [("gumbel d=5", gumbel_cfg), ("shock d=3", ExperimentConfig::from_toml(shock).unwrap())] {
        let csv: Vec<String> = [1, 4, 1]
            .into_iter()
            .map(|threads| {
                cfg.threads = threads;
                run_experiment(&cfg).unwrap().to_csv()
            })
            .collect();
        let same = csv.iter().all(|c| c.as_bytes() == csv[0].as_bytes());
        ok &= same;
        parts.push(format!("{label}: {} bytes, identical under 1/4/1 threads: {same}", csv[0].len()));
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let mut unexpected = Vec::new();
    let mut report = |k: usize, start: Instant, o: Outcome| {
        let expected_fail = EXPECTED_FAILURES.contains(&k);
        let status = if o.passed { "PASS" } else { "FAIL" };
        let tag = if expected_fail && !o.passed && o.known_shortfall { " [expected]" } else { "" };
        println!("criterion {k}: {status}{tag} ({:.1}s) {}", start.elapsed().as_secs_f64(), o.detail);
        let as_expected = if expected_fail { !o.passed && o.known_shortfall } else { o.passed };
        if !as_expected {
            unexpected.push(k);
        }
    };
    let t = Instant::now();
    report(1, t, criterion_1());
    let t = Instant::now();
    report(2, t, criterion_2());
    let t = Instant::now();
    report(3, t, criterion_3());
    let t = Instant::now();
    report(4, t, criterion_4());
    let t = Instant::now();
    report(5, t, criterion_5());
    let t = Instant::now();
    report(6, t, criterion_6());
    let t = Instant::now();
    let (o, corrected) = criterion_7();
    report(7, t, o);
    println!("  note: {corrected}");
    let t = Instant::now();
    report(8, t, criterion_8());
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
