//! CODATA-2018 constants and the water-dipole parameter set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{AngularFrequency, Energy, Length};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const DEUTERON_MASS: f64 = 3.343_583_772_4e-27;
pub const TRITON_MASS: f64 = 5.007_356_744_6e-27;

/// The constant table every module reads from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// J/K
    pub k_b: f64,
    /// kg
    pub m_p: f64,
    /// kg
    pub m_e: f64,
    /// C
    pub e_p: f64,
}

impl PhysicalConstants {
    /// Boltzmann constant in eV/K.
    pub fn k_b_ev(&self) -> f64 {
        self.k_b / self.e_p
    }

    pub fn proton_electron_ratio(&self) -> f64 {
        self.m_p / self.m_e
    }
}

pub const fn constants() -> PhysicalConstants {
    PhysicalConstants {
        hbar: HBAR,
        k_b: BOLTZMANN,
        m_p: PROTON_MASS,
        m_e: ELECTRON_MASS,
        e_p: ELEMENTARY_CHARGE,
    }
}

/// Rotational two-level parameters of a single water molecule.
///
/// Moment of inertia and dipole moment are derived from the proton mass,
/// proton charge and the two lengths; they are never stored independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterDipoleParams {
    pub d: Length,
    pub p: Length,
    pub epsilon: Energy,
    m_p: f64,
    e_p: f64,
}

impl WaterDipoleParams {
    pub fn new(c: &PhysicalConstants, d: Length, p: Length, epsilon: Energy) -> Result<Self> {
        if !(epsilon.si() > 0.0) {
            return Err(Error::invalid("epsilon", "level spacing must be > 0"));
        }
        if !(d.si() > 0.0) || !(p.si() > 0.0) {
            return Err(Error::invalid("d/P", "lengths must be > 0"));
        }
        Ok(Self { d, p, epsilon, m_p: c.m_p, e_p: c.e_p })
    }

    /// I = 2 m_p d², kg·m²
    pub fn moment_of_inertia(&self) -> f64 {
        2.0 * self.m_p * self.d.si() * self.d.si()
    }

    /// μ = 2 e_p P, C·m
    pub fn dipole_moment(&self) -> f64 {
        2.0 * self.e_p * self.p.si()
    }

    pub fn epsilon_ev(&self) -> f64 {
        self.epsilon.si() / self.e_p
    }
}

/// d = 0.82 Å, P = 0.2 Å, ε = 24.8 meV.
pub fn water_params(c: &PhysicalConstants) -> WaterDipoleParams {
    WaterDipoleParams {
        d: Length::angstrom(0.82),
        p: Length::angstrom(0.2),
        epsilon: Energy::from_si(24.8e-3 * c.e_p),
        m_p: c.m_p,
        e_p: c.e_p,
    }
}

/// ε/ħ for the two-level transition.
pub fn transition_frequency(params: &WaterDipoleParams) -> Result<AngularFrequency> {
    if !(params.epsilon.si() > 0.0) {
        return Err(Error::invalid("epsilon", "level spacing must be > 0"));
    }
    Ok(AngularFrequency::from_si(params.epsilon.si() / HBAR))
}
