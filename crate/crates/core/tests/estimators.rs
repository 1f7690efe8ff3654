mod common;

use common::mean_var;
use copula_is::calibration::{calibrate_discrete_direct, calibrate_discrete_rejection, DiscreteGrid};
use copula_is::estimators::{Estimate, Functional, FunctionalKind};
use copula_is::rng::{derive_stream, seeded, Lane};
use copula_is::{case_study_margins, Copula, DirectSampler, MixingDistribution, PlainSampler, RejectionSampler, Sampler};

fn rare_mixes(c: &Copula, s: f64) -> (MixingDistribution, MixingDistribution) {
    let psi = |t: f64| f64::from(t >= s);
    let grid = DiscreteGrid::default();
    (calibrate_discrete_rejection(psi, c, &grid).unwrap(), calibrate_discrete_direct(psi, &grid).unwrap())
}

fn estimate(sampler: &dyn Sampler, f: &Functional, n: usize, rep: u64, lane: Lane, raw: bool) -> Estimate {
    let mut rng = derive_stream(99, rep, lane);
    let draws: Vec<_> = (0..n).map(|_| sampler.sample(&mut rng).unwrap()).collect();
    let values: Vec<f64> = draws.iter().map(|d| f.eval(&d.v).unwrap()).collect();
    let weights: Vec<f64> = draws.iter().map(|d| d.weight).collect();
    if raw {
        Estimate::raw(&values, &weights).unwrap()
    } else {
        Estimate::self_normalized(&values, &weights).unwrap()
    }
}

#[test]
fn raw_estimates_of_exceedance_probabilities_are_unbiased() {
    let s = 0.99;
    for c in [Copula::clayton(1.0, 3).unwrap(), Copula::gumbel(1.5, 3).unwrap(), Copula::frank(4.0, 3).unwrap()] {
        let truth = 1.0 - c.diagonal(s);
        let f = Functional::new(FunctionalKind::RareMaxIndicator { s }, Vec::new());
        let (rej, dir) = rare_mixes(&c, s);
        let samplers: [(Box<dyn Sampler>, Lane); 2] = [
            (Box::new(RejectionSampler::new(&c, rej).unwrap()), Lane::Rejection),
            (Box::new(DirectSampler::new(&c, dir).unwrap()), Lane::Direct),
        ];
        for (sampler, lane) in &samplers {
            let e = estimate(sampler.as_ref(), &f, 50_000, 0, *lane, true);
            assert!((e.value - truth).abs() < 4.0 * e.se, "{:?} {lane:?}: {} vs {truth} (se {})", c.family(), e.value, e.se);
        }
    }
}

/// Jarque-Bera statistic with its chi-square(2) tail `exp(-JB / 2)`.
fn jarque_bera_p(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (m, _) = mean_var(x);
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let jb = n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    (-jb / 2.0).exp()
}

#[test]
fn repeated_estimates_are_approximately_normal() {
    let c = Copula::gumbel(1.5, 2).unwrap();
    // A grid atom, so the proposal puts mass exactly at the rarity level.
    let s = 1.0 - 0.5f64.powi(7);
    let f = Functional::new(FunctionalKind::RareMaxIndicator { s }, Vec::new());
    let (_, dir) = rare_mixes(&c, s);
    let sampler = DirectSampler::new(&c, dir).unwrap();
    let reps: Vec<f64> = (0..300).map(|r| estimate(&sampler, &f, 2000, r, Lane::Direct, true).value).collect();
    let p = jarque_bera_p(&reps);
    assert!(p > 1e-3, "JB p-value {p}");
}

#[test]
fn stop_loss_intervals_cover_the_reference() {
    let d = 2;
    let c = Copula::gumbel(1.5, d).unwrap();
    let margins = case_study_margins(d);
    let f = Functional::stop_loss(1e5 * d as f64, margins.clone());
    let plain = PlainSampler::new(&c);
    let mut rng = seeded(2024);
    let mut u = vec![0.0; d];
    let mc: Vec<f64> = (0..1_000_000)
        .map(|_| {
            plain.sample_into(&mut rng, &mut u).unwrap();
            f.eval(&u).unwrap()
        })
        .collect();
    let reference = Estimate::plain(&mc).unwrap();

    let psi = |t: f64| f.on_diagonal(t).unwrap();
    let mix = calibrate_discrete_rejection(psi, &c, &DiscreteGrid::default()).unwrap();
    let sampler = RejectionSampler::new(&c, mix).unwrap();
    let reps = 200;
    let mut covered = 0;
    for r in 0..reps {
        let e = estimate(&sampler, &f, 1000, r, Lane::Rejection, false);
        if (e.value - reference.value).abs() <= 1.96 * e.se {
            covered += 1;
        }
    }
    let rate = covered as f64 / reps as f64;
    assert!((0.90..=0.99).contains(&rate), "coverage {rate} (reference {} +- {})", reference.value, reference.se);
}

#[test]
fn self_normalized_and_raw_agree_on_large_samples() {
    let d = 5;
    let c = Copula::clayton(1.0, d).unwrap();
    let f = Functional::stop_loss(1e5 * d as f64, case_study_margins(d));
    let mix = calibrate_discrete_direct(|t| f.on_diagonal(t).unwrap(), &DiscreteGrid::default()).unwrap();
    let sampler = DirectSampler::new(&c, mix).unwrap();
    let raw = estimate(&sampler, &f, 40_000, 5, Lane::Direct, true);
    let sn = estimate(&sampler, &f, 40_000, 5, Lane::Direct, false);
    assert!((raw.value - sn.value).abs() < 3.0 * (raw.se + sn.se), "{raw:?} {sn:?}");
}
