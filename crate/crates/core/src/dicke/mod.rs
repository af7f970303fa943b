//! Collective two-level water dipoles coupled to quantized cavity modes.
//!
//! The ensemble lives in the symmetric spin sector S = N/2 and each mode in a
//! truncated Fock space. Hamiltonians are dense complex matrices in energy
//! units (J); dynamics is unitary.

mod basis;
mod evolve;
mod hamiltonian;
mod observables;
mod scan;

pub use basis::{BasisState, CollectiveBasis};
pub use evolve::{evolve, evolve_with, Propagator, PropagatorMethod, Trajectory, EIGEN_DIMENSION_LIMIT};
pub use hamiltonian::{
    build_hem, build_hwm, build_interaction, build_interaction_with, build_total, build_total_with,
    excitation_operator, CouplingForm, HamiltonianMatrix, Term,
};
pub use observables::{emission_rate, measure, Observables};
pub use scan::{independent_scan, power_law_exponent, superradiance_scan, ScanConfig, ScanRow};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{AngularFrequency, Energy};

/// N identical two-level molecules with gap ε and dipole μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelEnsemble {
    n: usize,
    epsilon: Energy,
    mu: f64,
}

impl TwoLevelEnsemble {
    pub fn new(n: usize, epsilon: Energy, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "need at least one molecule"));
        }
        if !(epsilon.si() > 0.0) {
            return Err(Error::invalid("epsilon", "level spacing must be > 0"));
        }
        if !(mu >= 0.0) {
            return Err(Error::invalid("mu", "dipole moment must be >= 0"));
        }
        Ok(Self { n, epsilon, mu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> Energy {
        self.epsilon
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// A single normal mode. `coupling` is the matrix element g_k that absorbs
/// the dipole moment, polarisation and field normalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityMode {
    pub omega: AngularFrequency,
    pub kappa: [f64; 3],
    pub coupling: Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavityModeSet {
    modes: Vec<CavityMode>,
    photon_cutoff: usize,
}

impl CavityModeSet {
    pub fn new(modes: Vec<CavityMode>, photon_cutoff: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("modes", "need at least one cavity mode"));
        }
        if photon_cutoff == 0 {
            return Err(Error::invalid("photon_cutoff", "cutoff must be >= 1"));
        }
        for m in &modes {
            if !(m.omega.si() > 0.0) || !m.omega.si().is_finite() {
                return Err(Error::invalid("omega", "mode frequency must be finite and > 0"));
            }
            if !m.coupling.si().is_finite() {
                return Err(Error::invalid("g", "coupling must be finite"));
            }
        }
        Ok(Self { modes, photon_cutoff })
    }

    /// One mode along z with coupling `g`.
    pub fn single(omega: AngularFrequency, g: Energy, photon_cutoff: usize) -> Result<Self> {
        Self::new(vec![CavityMode { omega, kappa: [0.0, 0.0, 0.0], coupling: g }], photon_cutoff)
    }

    pub fn modes(&self) -> &[CavityMode] {
        &self.modes
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    /// Default cutoff for a fully excited ensemble: N + 2.
    pub fn default_cutoff(n_molecules: usize) -> usize {
        n_molecules + 2
    }
}

/// Complex amplitudes over a [`CollectiveBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: nalgebra::DVector<Complex64>,
    basis: CollectiveBasis,
}

impl QuantumState {
    pub fn new(basis: CollectiveBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch { state: amplitudes.len(), basis: basis.dimension() });
        }
        Ok(Self { amplitudes: nalgebra::DVector::from_vec(amplitudes), basis })
    }

    pub(crate) fn from_vector(basis: CollectiveBasis, amplitudes: nalgebra::DVector<Complex64>) -> Self {
        Self { amplitudes, basis }
    }

    pub fn basis_state(basis: CollectiveBasis, state: &BasisState) -> Self {
        let mut amps = nalgebra::DVector::zeros(basis.dimension());
        amps[basis.index(state)] = Complex64::new(1.0, 0.0);
        Self { amplitudes: amps, basis }
    }

    /// All molecules in the lower level, every mode empty.
    pub fn ground(basis: CollectiveBasis) -> Self {
        let s = BasisState { spin_index: 0, photons: vec![0; basis.n_modes()] };
        Self::basis_state(basis, &s)
    }

    /// All molecules in the upper level (m = +N/2), every mode empty.
    pub fn fully_excited(basis: CollectiveBasis) -> Self {
        let s = BasisState { spin_index: basis.n_molecules(), photons: vec![0; basis.n_modes()] };
        Self::basis_state(basis, &s)
    }

    pub fn amplitudes(&self) -> &nalgebra::DVector<Complex64> {
        &self.amplitudes
    }

    pub fn basis(&self) -> &CollectiveBasis {
        &self.basis
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= Complex64::new(n, 0.0);
        }
        self
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }
}
