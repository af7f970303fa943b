use rayon::prelude::*;
use serde::Serialize;

use super::*;
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::units::{AngularFrequency, Energy};

/// One resonant-ish mode with fixed coupling, shared across all N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig {
    pub epsilon: Energy,
    pub omega: AngularFrequency,
    pub g: Energy,
    /// s
    pub horizon: f64,
    /// s
    pub dt: f64,
    pub dimension_cap: usize,
}

impl ScanConfig {
    /// Resonant mode, horizon of ten single-molecule Rabi times ħ/g sampled
    /// with 4000 steps.
    pub fn resonant(epsilon: Energy, g: Energy) -> Self {
        let horizon = if g.si() > 0.0 { 10.0 * HBAR / g.si() } else { 10.0 * HBAR / epsilon.si() };
        Self {
            epsilon,
            omega: AngularFrequency::from_si(epsilon.si() / HBAR),
            g,
            horizon,
            dt: horizon / 4000.0,
            dimension_cap: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub dimension: usize,
    /// Peak of d⟨n⟩/dt over the horizon, photons per second.
    pub peak_emission_rate: f64,
}

fn emission_series(n: usize, cfg: &ScanConfig) -> Result<(usize, Vec<f64>)> {
    let cutoff = CavityModeSet::default_cutoff(n);
    let ens = TwoLevelEnsemble::new(n, cfg.epsilon, 0.0)?;
    let modes = CavityModeSet::single(cfg.omega, cfg.g, cutoff)?;
    let basis = CollectiveBasis::new(n, 1, cutoff)?;
    if basis.dimension() > cfg.dimension_cap {
        return Err(Error::DimensionCapExceeded { dimension: basis.dimension(), cap: cfg.dimension_cap });
    }
    let h = build_total(&ens, &modes, &basis)?;
    let traj = evolve(&QuantumState::fully_excited(basis.clone()), &h, cfg.horizon, cfg.dt)?;
    let rates = traj.states.iter().map(|s| emission_rate(s, &h)).collect();
    Ok((basis.dimension(), rates))
}

fn peak(series: &[f64]) -> f64 {
    series.iter().copied().fold(0.0, f64::max)
}

/// Collective emission: N molecules share one mode, starting fully excited.
pub fn superradiance_scan(n_list: &[usize], cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    for &n in n_list {
        let dim = (n + 1) * (CavityModeSet::default_cutoff(n) + 1);
        if dim > cfg.dimension_cap {
            return Err(Error::DimensionCapExceeded { dimension: dim, cap: cfg.dimension_cap });
        }
    }
    n_list
        .par_iter()
        .map(|&n| {
            let (dimension, series) = emission_series(n, cfg)?;
            Ok(ScanRow { n, dimension, peak_emission_rate: peak(&series) })
        })
        .collect()
}

/// Reference without cooperation: each molecule is its own single-spin
/// system with its own mode; rates add.
pub fn independent_scan(n_list: &[usize], cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    let (dimension, single) = emission_series(1, cfg)?;
    Ok(n_list
        .iter()
        .map(|&n| {
            let summed: Vec<f64> = single.iter().map(|r| (0..n).map(|_| r).sum()).collect();
            ScanRow { n, dimension, peak_emission_rate: peak(&summed) }
        })
        .collect())
}

/// Slope of a least-squares line through (ln N, ln peak).
pub fn power_law_exponent(rows: &[ScanRow]) -> f64 {
    let x: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.peak_emission_rate.ln()).collect();
    linear_fit(&x, &y).slope
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScanConfig {
        ScanConfig::resonant(Energy::mev(24.8), Energy::mev(0.5))
    }

    #[test]
    fn single_molecule_peak_is_g_over_hbar() {
        // <n>(t) = sin²(gt/ħ) so the peak of d<n>/dt is g/ħ.
        let c = cfg();
        let rows = superradiance_scan(&[1], &c).unwrap();
        let expected = c.g.si() / HBAR;
        assert!((rows[0].peak_emission_rate - expected).abs() / expected < 1e-5);
    }

    #[test]
    fn two_molecules_emit_superlinearly() {
        let rows = superradiance_scan(&[1, 2], &cfg()).unwrap();
        assert!(rows[1].peak_emission_rate / rows[0].peak_emission_rate > 2.0);
    }

    #[test]
    fn zero_coupling_never_emits() {
        let c = ScanConfig::resonant(Energy::mev(24.8), Energy::mev(0.0));
        for r in superradiance_scan(&[1, 2, 4], &c).unwrap() {
            assert_eq!(r.peak_emission_rate, 0.0);
        }
    }

    #[test]
    fn independent_reference_is_linear() {
        let rows = independent_scan(&[1, 2, 4, 8], &cfg()).unwrap();
        assert!((power_law_exponent(&rows) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let mut c = cfg();
        c.dimension_cap = 50;
        assert_eq!(
            superradiance_scan(&[1, 8], &c),
            Err(Error::DimensionCapExceeded { dimension: 99, cap: 50 })
        );
    }
}
