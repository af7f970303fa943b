use num_complex::Complex64;
use serde::Serialize;

use super::{HamiltonianMatrix, QuantumState};
use crate::constants::HBAR;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    /// ⟨S⟩ = ⟨Σ_j s_z^j⟩
    pub inversion: f64,
    /// ⟨n_k⟩ per mode
    pub photons: Vec<f64>,
    /// ⟨N_exc⟩ = Σ_k ⟨n_k⟩ + ⟨S⟩ + N/2
    pub excitation: f64,
    /// Probability of m = +N/2 summed over photon numbers.
    pub fully_excited_population: f64,
}

pub fn measure(state: &QuantumState) -> Observables {
    let basis = state.basis();
    let mut inversion = 0.0;
    let mut photons = vec![0.0; basis.n_modes()];
    let mut fully_excited_population = 0.0;
    let mut total = 0.0;
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let s = basis.state(i);
        total += p;
        inversion += p * basis.m(s.spin_index);
        for (acc, &n) in photons.iter_mut().zip(&s.photons) {
            *acc += p * n as f64;
        }
        if s.spin_index == basis.n_molecules() {
            fully_excited_population += p;
        }
    }
    // Normalise away the residual (≤1e-9) norm drift.
    if total > 0.0 {
        inversion /= total;
        photons.iter_mut().for_each(|n| *n /= total);
        fully_excited_population /= total;
    }
    let excitation = photons.iter().sum::<f64>() + inversion + basis.total_spin();
    Observables { inversion, photons, excitation, fully_excited_population }
}

/// d⟨n_total⟩/dt = (i/ħ)⟨[H, n_total]⟩, in photons per second.
pub fn emission_rate(state: &QuantumState, h: &HamiltonianMatrix) -> f64 {
    let basis = state.basis();
    let n_tot: Vec<f64> = basis.states().map(|s| s.photons.iter().sum::<usize>() as f64).collect();
    let psi = state.amplitudes();
    let m = h.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..psi.len() {
        if psi[j] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..psi.len() {
            let c = m[(i, j)] * (n_tot[j] - n_tot[i]);
            if c != Complex64::new(0.0, 0.0) {
                acc += psi[i].conj() * c * psi[j];
            }
        }
    }
    (Complex64::new(0.0, 1.0) * acc).re / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::*;
    use crate::units::{AngularFrequency, Energy};

    #[test]
    fn ground_and_excited_extremes() {
        for n in [1, 2, 5] {
            let basis = CollectiveBasis::new(n, 2, 3).unwrap();
            let g = measure(&QuantumState::ground(basis.clone()));
            assert_eq!(g.inversion, -(n as f64) / 2.0);
            assert_eq!(g.photons, vec![0.0, 0.0]);
            assert_eq!(g.excitation, 0.0);
            let e = measure(&QuantumState::fully_excited(basis));
            assert_eq!(e.inversion, n as f64 / 2.0);
            assert_eq!(e.excitation, n as f64);
            assert_eq!(e.fully_excited_population, 1.0);
        }
    }

    #[test]
    fn equal_superposition_has_zero_inversion() {
        let basis = CollectiveBasis::new(1, 1, 1).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![
            Complex64::new(a, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, a),
            Complex64::new(0.0, 0.0),
        ];
        let s = QuantumState::new(basis, amps).unwrap();
        let o = measure(&s);
        assert!(o.inversion.abs() < 1e-15);
        assert!((o.fully_excited_population - 0.5).abs() < 1e-15);
    }

    #[test]
    fn emission_rate_vanishes_for_basis_states_and_zero_coupling() {
        let eps = Energy::mev(24.8);
        let ens = TwoLevelEnsemble::new(3, eps, 0.0).unwrap();
        let modes = CavityModeSet::single(AngularFrequency::from_si(eps.si() / HBAR), Energy::mev(1.0), 5).unwrap();
        let basis = CollectiveBasis::new(3, 1, 5).unwrap();
        let h = build_total(&ens, &modes, &basis).unwrap();
        assert_eq!(emission_rate(&QuantumState::fully_excited(basis.clone()), &h), 0.0);

        let modes0 = CavityModeSet::single(AngularFrequency::from_si(eps.si() / HBAR), Energy::mev(0.0), 5).unwrap();
        let h0 = build_total(&ens, &modes0, &basis).unwrap();
        let amps: Vec<Complex64> = (0..basis.dimension()).map(|i| Complex64::new(1.0, i as f64)).collect();
        let s = QuantumState::new(basis, amps).unwrap().normalized();
        assert_eq!(emission_rate(&s, &h0), 0.0);
    }
}
