use serde::{Deserialize, Serialize};

use crate::constants::{ELEMENTARY_CHARGE as EV, HBAR, PROTON_MASS};
use crate::error::{Error, Result};

const ANGSTROM: f64 = 1e-10;

/// A two-coordinate potential with masses for each coordinate.
pub trait Surface: Sync {
    /// V(ξ, η) in J, coordinates in m.
    fn potential(&self, xi: f64, eta: f64) -> f64;
    fn mass_xi(&self) -> f64;
    fn mass_eta(&self) -> f64;
    fn symmetry(&self) -> Symmetry {
        Symmetry::None
    }
}

/// Reflection the surface is invariant under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    None,
    /// V(ξ, η) = V(−ξ, η)
    Xi,
    /// V(ξ, η) = V(−ξ, −η)
    Inversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingForm {
    /// c·ξ²·η; c in eV/Å³ at the input boundary.
    XiSqEta,
    /// c·ξ·η; c in eV/Å² at the input boundary.
    XiEta,
}

/// User-facing description of a surface, in eV, Å and kg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PesSpec {
    pub v_b_ev: f64,
    pub xi0_angstrom: f64,
    pub hw_eta_ev: f64,
    pub coupling_form: CouplingForm,
    pub c: f64,
    pub mass_xi_kg: f64,
    pub mass_eta_kg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// No coupling between the coordinates.
    Neutral,
    /// c·ξ²·η with c = 1 eV/Å³.
    Promoting,
    /// c·ξ·η with c = 0.3 eV/Å².
    Suppressing,
}

impl Preset {
    pub fn spec(self) -> PesSpec {
        let base = PesSpec {
            v_b_ev: 0.3,
            xi0_angstrom: 0.3,
            hw_eta_ev: 0.1,
            coupling_form: CouplingForm::XiSqEta,
            c: 0.0,
            mass_xi_kg: PROTON_MASS,
            mass_eta_kg: PROTON_MASS,
        };
        match self {
            Preset::Neutral => base,
            Preset::Promoting => PesSpec { c: 1.0, ..base },
            Preset::Suppressing => PesSpec { coupling_form: CouplingForm::XiEta, c: 0.3, ..base },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Neutral => "neutral",
            Preset::Promoting => "promoting",
            Preset::Suppressing => "suppressing",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neutral" => Ok(Preset::Neutral),
            "promoting" => Ok(Preset::Promoting),
            "suppressing" => Ok(Preset::Suppressing),
            other => Err(Error::invalid("preset", format!("unknown preset `{other}`"))),
        }
    }
}

/// Quartic double well in ξ ⊗ harmonic mode in η, plus a bilinear coupling.
///
/// V(ξ, η) = V_b (1 − (ξ/ξ₀)²)² + ½ m_η ω_η² η² + c·f(ξ)·η
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pes2D {
    /// J
    pub v_b: f64,
    /// m
    pub xi0: f64,
    /// rad/s
    pub omega_eta: f64,
    pub coupling_form: CouplingForm,
    /// SI: J/m³ (ξ²η) or J/m² (ξη)
    pub c: f64,
    pub mass_xi: f64,
    pub mass_eta: f64,
}

pub fn build_pes(spec: &PesSpec) -> Result<Pes2D> {
    let positive = |name: &'static str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(name, "must be finite and > 0"))
        }
    };
    positive("v_b", spec.v_b_ev)?;
    positive("xi0", spec.xi0_angstrom)?;
    positive("hw_eta", spec.hw_eta_ev)?;
    positive("mass_xi", spec.mass_xi_kg)?;
    positive("mass_eta", spec.mass_eta_kg)?;
    if !spec.c.is_finite() {
        return Err(Error::invalid("c", "coupling must be finite"));
    }
    let c = match spec.coupling_form {
        CouplingForm::XiSqEta => spec.c * EV / ANGSTROM.powi(3),
        CouplingForm::XiEta => spec.c * EV / ANGSTROM.powi(2),
    };
    Ok(Pes2D {
        v_b: spec.v_b_ev * EV,
        xi0: spec.xi0_angstrom * ANGSTROM,
        omega_eta: spec.hw_eta_ev * EV / HBAR,
        coupling_form: spec.coupling_form,
        c,
        mass_xi: spec.mass_xi_kg,
        mass_eta: spec.mass_eta_kg,
    })
}

impl Pes2D {
    pub fn double_well(&self, xi: f64) -> f64 {
        let u = xi / self.xi0;
        let w = 1.0 - u * u;
        self.v_b * w * w
    }

    pub fn transverse(&self, eta: f64) -> f64 {
        0.5 * self.mass_eta * self.omega_eta * self.omega_eta * eta * eta
    }

    pub fn coupling(&self, xi: f64, eta: f64) -> f64 {
        match self.coupling_form {
            CouplingForm::XiSqEta => self.c * xi * xi * eta,
            CouplingForm::XiEta => self.c * xi * eta,
        }
    }

    /// ∂²V/∂η², constant because the coupling is linear in η.
    pub fn transverse_curvature(&self, _xi: f64) -> f64 {
        self.mass_eta * self.omega_eta * self.omega_eta
    }

    /// ħ·√(∂²V/∂η² / m_η) at a given ξ.
    pub fn local_transverse_quantum(&self, xi: f64) -> f64 {
        HBAR * (self.transverse_curvature(xi) / self.mass_eta).sqrt()
    }

    /// Small-oscillation frequency at the bottom of either well.
    pub fn well_frequency(&self) -> f64 {
        (8.0 * self.v_b / (self.mass_xi * self.xi0 * self.xi0)).sqrt()
    }

    /// Largest |η| displacement of the transverse minimum for |ξ| ≤ `xi_max`.
    pub fn transverse_shift(&self, xi_max: f64) -> f64 {
        let k = self.transverse_curvature(0.0);
        match self.coupling_form {
            CouplingForm::XiSqEta => (self.c * xi_max * xi_max / k).abs(),
            CouplingForm::XiEta => (self.c * xi_max / k).abs(),
        }
    }
}

impl Surface for Pes2D {
    fn potential(&self, xi: f64, eta: f64) -> f64 {
        self.double_well(xi) + self.transverse(eta) + self.coupling(xi, eta)
    }

    fn mass_xi(&self) -> f64 {
        self.mass_xi
    }

    fn mass_eta(&self) -> f64 {
        self.mass_eta
    }

    fn symmetry(&self) -> Symmetry {
        match self.coupling_form {
            _ if self.c == 0.0 => Symmetry::Xi,
            CouplingForm::XiSqEta => Symmetry::Xi,
            CouplingForm::XiEta => Symmetry::Inversion,
        }
    }
}
