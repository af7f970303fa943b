//! Stochastic vesicle release gated by a tunnelling trigger.

use std::collections::BTreeMap;

use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{Rate, Time};

/// Generator used for every train; echoed in output metadata.
pub const RNG_NAME: &str = "ChaCha8";
/// Example gate window (s). Unvalidated.
pub const DEFAULT_GATE_WINDOW_S: f64 = 2e-4;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriggerModel {
    rate: Rate,
    gate_window: Time,
}

impl TriggerModel {
    pub fn new(rate: Rate, gate_window: Time) -> Result<Self> {
        if !(rate.si() > 0.0 && rate.si().is_finite()) {
            return Err(Error::invalid("rate", "must be finite and > 0"));
        }
        if !(gate_window.si() > 0.0 && gate_window.si().is_finite()) {
            return Err(Error::invalid("gate_window", "must be finite and > 0"));
        }
        let model = Self { rate, gate_window };
        let p = release_probability(&model);
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("rate", format!("k·tau = {:e} gives p = {p}, outside (0, 1)", model.k_tau())));
        }
        Ok(model)
    }

    pub fn rate(&self) -> Rate {
        self.rate
    }

    pub fn gate_window(&self) -> Time {
        self.gate_window
    }

    pub fn k_tau(&self) -> f64 {
        self.rate.si() * self.gate_window.si()
    }
}

/// p = 1 − exp(−k·τ): at least one trigger event inside the gate window.
pub fn release_probability(model: &TriggerModel) -> f64 {
    -(-model.k_tau()).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReleaseTrain {
    pub outcomes: Vec<bool>,
    pub seed: u64,
    pub stream: u64,
    pub p: f64,
}

fn check_inputs(p: f64, n: usize) -> Result<Bernoulli> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", "must lie in (0, 1)"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "need at least one impulse"));
    }
    Bernoulli::new(p).map_err(|e| Error::invalid("p", e.to_string()))
}

fn draw(dist: Bernoulli, n: usize, seed: u64, stream: u64, p: f64) -> ReleaseTrain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let outcomes = (0..n).map(|_| dist.sample(&mut rng)).collect();
    ReleaseTrain { outcomes, seed, stream, p }
}

/// n i.i.d. Bernoulli(p) outcomes; (p, n, seed) fixes the train exactly.
pub fn simulate_train(p: f64, n: usize, seed: u64) -> Result<ReleaseTrain> {
    let dist = check_inputs(p, n)?;
    Ok(draw(dist, n, seed, 0, p))
}

/// `count` independent trains from one seed, one generator stream each.
/// Stream 0 reproduces `simulate_train`.
pub fn simulate_trains(p: f64, n: usize, seed: u64, count: usize) -> Result<Vec<ReleaseTrain>> {
    let dist = check_inputs(p, n)?;
    Ok((0..count as u64).into_par_iter().map(|s| draw(dist, n, seed, s, p)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalStats {
    pub n: usize,
    pub releases: usize,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// run length → number of maximal runs of consecutive releases
    pub release_runs: BTreeMap<usize, usize>,
    /// run length → number of maximal runs of consecutive failures
    pub failure_runs: BTreeMap<usize, usize>,
}

/// Wilson score interval for k successes in n trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let phat = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (phat + z2 / (2.0 * nf)) / denom;
    let half = z * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

pub fn empirical_stats(outcomes: &[bool]) -> Result<EmpiricalStats> {
    if outcomes.is_empty() {
        return Err(Error::invalid("train", "empty"));
    }
    let n = outcomes.len();
    let releases = outcomes.iter().filter(|&&b| b).count();
    let (ci_low, ci_high) = wilson_interval(releases, n, Z_95);
    let mut release_runs = BTreeMap::new();
    let mut failure_runs = BTreeMap::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || outcomes[i] != outcomes[start] {
            let hist = if outcomes[start] { &mut release_runs } else { &mut failure_runs };
            *hist.entry(i - start).or_insert(0) += 1;
            start = i;
        }
    }
    Ok(EmpiricalStats {
        n,
        releases,
        frequency: releases as f64 / n as f64,
        ci_low,
        ci_high,
        release_runs,
        failure_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tunneling::{temperature_sweep, wkb_preset, wkb_rate, SweepModel};
    use crate::units::Energy;
    use proptest::prelude::*;
    use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

    fn model(k: f64, tau: f64) -> TriggerModel {
        TriggerModel::new(Rate::from_si(k), Time::from_si(tau)).unwrap()
    }

    #[test]
    fn probability_examples() {
        assert!((release_probability(&model(2f64.ln(), 1.0)) - 0.5).abs() < 1e-15);
        let small = release_probability(&model(1e-3, 1e-6));
        assert!((small - 1e-9).abs() < 1e-17);
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(TriggerModel::new(Rate::from_si(0.0), Time::from_si(1.0)).is_err());
        assert!(TriggerModel::new(Rate::from_si(1.0), Time::from_si(-1.0)).is_err());
        // p rounds to 1.
        assert!(TriggerModel::new(Rate::from_si(1e3), Time::from_si(1.0)).is_err());
    }

    #[test]
    fn wkb_preset_gives_sub_unity_release() {
        let k = wkb_rate(&wkb_preset()).unwrap();
        let p = release_probability(&TriggerModel::new(k, Time::from_si(DEFAULT_GATE_WINDOW_S)).unwrap());
        assert!(p > 0.0 && p < 0.5, "p = {p}");
    }

    #[test]
    fn release_probability_follows_temperature() {
        let tau = Time::from_si(1e-6);
        let thermal = SweepModel::Thermal { v_c: 1e12, e_a: Energy::ev(0.5) };
        let ps: Vec<f64> = temperature_sweep(&thermal, 250.0, 350.0, 21)
            .unwrap()
            .iter()
            .map(|pt| release_probability(&TriggerModel::new(Rate::from_si(pt.k_per_s), tau).unwrap()))
            .collect();
        assert!(ps.windows(2).all(|w| w[1] > w[0]));
        let wkb: Vec<f64> = temperature_sweep(&SweepModel::Wkb(wkb_preset()), 250.0, 350.0, 21)
            .unwrap()
            .iter()
            .map(|pt| release_probability(&TriggerModel::new(Rate::from_si(pt.k_per_s), tau).unwrap()))
            .collect();
        assert!(wkb.iter().all(|&p| p == wkb[0]));
    }

    #[test]
    fn same_seed_same_train() {
        let a = simulate_train(0.3, 1000, 42).unwrap();
        let b = simulate_train(0.3, 1000, 42).unwrap();
        let c = simulate_train(0.3, 1000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.outcomes, c.outcomes);
        assert_eq!(simulate_trains(0.3, 1000, 42, 3).unwrap()[0], a);
    }

    #[test]
    fn frequency_within_three_sigma() {
        for (n, seed) in [(1_000, 1), (10_000, 2), (100_000, 3)] {
            for p in [0.5, 0.3] {
                let s = empirical_stats(&simulate_train(p, n, seed).unwrap().outcomes).unwrap();
                let sigma = (p * (1.0 - p) / n as f64).sqrt();
                assert!((s.frequency - p).abs() < 3.0 * sigma, "n={n} p={p} f={}", s.frequency);
            }
        }
    }

    #[test]
    fn rare_release_counts_fit_binomial() {
        // 400 blocks of 250 impulses; pool the block counts into cells with
        // expected count ≥ 5 and compare with Binomial(250, p).
        let (p, block, blocks) = (0.01, 250usize, 400usize);
        let train = simulate_train(p, block * blocks, 7).unwrap();
        let mut observed = vec![0usize; block + 1];
        for chunk in train.outcomes.chunks(block) {
            observed[chunk.iter().filter(|&&b| b).count()] += 1;
        }
        let binom = Binomial::new(p, block as u64).unwrap();
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let (mut e_acc, mut o_acc) = (0.0, 0.0);
        for (k, &o) in observed.iter().enumerate() {
            e_acc += blocks as f64 * binom.pmf(k as u64);
            o_acc += o as f64;
            if e_acc >= 5.0 {
                cells.push((o_acc, e_acc));
                e_acc = 0.0;
                o_acc = 0.0;
            }
        }
        let last = cells.last_mut().unwrap();
        last.0 += o_acc;
        last.1 += e_acc;
        let chi2: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
        let dof = (cells.len() - 1) as f64;
        let p_value = 1.0 - ChiSquared::new(dof).unwrap().cdf(chi2);
        assert!(p_value > 1e-3, "chi2={chi2} dof={dof} p={p_value}");
    }

    #[test]
    fn wilson_coverage_in_band() {
        let trains = simulate_trains(0.3, 10_000, 2024, 100).unwrap();
        let covered = trains
            .iter()
            .filter(|t| {
                let s = empirical_stats(&t.outcomes).unwrap();
                s.ci_low <= 0.3 && 0.3 <= s.ci_high
            })
            .count();
        let coverage = covered as f64 / 100.0;
        assert!((0.90..=0.99).contains(&coverage), "coverage {coverage}");
    }

    #[test]
    fn stats_examples() {
        let all = empirical_stats(&[true; 5]).unwrap();
        assert_eq!(all.frequency, 1.0);
        assert_eq!(all.release_runs.get(&5), Some(&1));
        let alt: Vec<bool> = (0..20).map(|i| i % 2 == 0).collect();
        let s = empirical_stats(&alt).unwrap();
        assert_eq!(s.frequency, 0.5);
        assert_eq!(s.release_runs.get(&1), Some(&10));
        assert_eq!(s.failure_runs.get(&1), Some(&10));
        assert!(empirical_stats(&[]).is_err());
    }

    #[test]
    fn wilson_matches_reference() {
        // statsmodels proportion_confint(30, 100, method="wilson")
        let (lo, hi) = wilson_interval(30, 100, Z_95);
        assert!((lo - 0.21894885294932756).abs() < 1e-12, "{lo}");
        assert!((hi - 0.39584854633346667).abs() < 1e-12, "{hi}");
    }

    proptest! {
        #[test]
        fn runs_account_for_every_impulse(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let s = empirical_stats(&bits).unwrap();
            let total: usize = s.release_runs.iter().chain(&s.failure_runs).map(|(l, c)| l * c).sum();
            prop_assert_eq!(total, bits.len());
            let released: usize = s.release_runs.iter().map(|(l, c)| l * c).sum();
            prop_assert_eq!(released, s.releases);
            prop_assert!(s.ci_low <= s.frequency && s.frequency <= s.ci_high);
        }

        #[test]
        fn probability_in_unit_interval(k in 1e-6f64..1e6, tau in 1e-9f64..1e-3) {
            if let Ok(m) = TriggerModel::new(Rate::from_si(k), Time::from_si(tau)) {
                let p = release_probability(&m);
                prop_assert!(p > 0.0 && p < 1.0);
                prop_assert!(p <= m.k_tau());
            }
        }
    }
}
