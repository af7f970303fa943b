use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CavityModeSet, CollectiveBasis, TwoLevelEnsemble};
use crate::constants::HBAR;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    WaterMolecules,
    Field,
    Interaction,
}

/// Which light-matter terms the interaction keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingForm {
    /// g (a† S⁻ + a S⁺); conserves the excitation number.
    #[default]
    RotatingWave,
    /// Adds the counter-rotating pair g (a† S⁺ + a S⁻).
    Full,
}

/// Dense Hermitian matrix in J over a [`CollectiveBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: DMatrix<Complex64>,
    basis: CollectiveBasis,
    terms: Vec<Term>,
}

impl HamiltonianMatrix {
    pub fn new(matrix: DMatrix<Complex64>, basis: CollectiveBasis, terms: Vec<Term>) -> Result<Self> {
        if matrix.nrows() != basis.dimension() || matrix.ncols() != basis.dimension() {
            return Err(Error::DimensionMismatch { state: matrix.nrows(), basis: basis.dimension() });
        }
        let h = Self { matrix, basis, terms };
        h.check_hermitian()?;
        Ok(h)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn basis(&self) -> &CollectiveBasis {
        &self.basis
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// max |H − H†| relative to max |H| (absolute when H = 0).
    pub fn hermitian_deviation(&self) -> f64 {
        let dev = max_abs(&(&self.matrix - self.matrix.adjoint()));
        let scale = self.max_norm();
        if scale > 0.0 {
            dev / scale
        } else {
            dev
        }
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation < HERMITIAN_TOL {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation })
        }
    }

    /// Real eigenvalues in J, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// max |[H, A]| / max |H| for a diagonal operator `a`.
    pub fn commutator_with_diagonal(&self, a: &[f64]) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let c = self.matrix[(i, j)] * (a[j] - a[i]);
                worst = worst.max(c.norm());
            }
        }
        let scale = self.max_norm();
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    fn sum(mut self, other: &HamiltonianMatrix) -> Self {
        self.matrix += &other.matrix;
        self.terms.extend_from_slice(&other.terms);
        self
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn check_basis(ensemble: &TwoLevelEnsemble, basis: &CollectiveBasis) -> Result<()> {
    if basis.n_molecules() != ensemble.n() {
        return Err(Error::BasisMismatch { basis: basis.n_molecules(), ensemble: ensemble.n() });
    }
    Ok(())
}

fn check_modes(modes: &CavityModeSet, basis: &CollectiveBasis) -> Result<()> {
    if basis.n_modes() != modes.modes().len() {
        return Err(Error::ModeCountMismatch { basis: basis.n_modes(), modes: modes.modes().len() });
    }
    if basis.cutoff() != modes.photon_cutoff() {
        return Err(Error::invalid("photon_cutoff", "basis and mode set disagree on the cutoff"));
    }
    Ok(())
}

fn diagonal(basis: &CollectiveBasis, f: impl Fn(usize) -> f64) -> DMatrix<Complex64> {
    let n = basis.dimension();
    DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(f(i), 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// ε S_z on the spin factor, identity on the photons.
pub fn build_hwm(ensemble: &TwoLevelEnsemble, basis: &CollectiveBasis) -> Result<HamiltonianMatrix> {
    check_basis(ensemble, basis)?;
    let eps = ensemble.epsilon().si();
    let m = diagonal(basis, |i| eps * basis.m(basis.state(i).spin_index));
    HamiltonianMatrix::new(m, basis.clone(), vec![Term::WaterMolecules])
}

/// Σ_k ħω_k (n_k + ½), zero-point shift included.
pub fn build_hem(modes: &CavityModeSet, basis: &CollectiveBasis) -> Result<HamiltonianMatrix> {
    check_modes(modes, basis)?;
    let m = diagonal(basis, |i| {
        let s = basis.state(i);
        modes
            .modes()
            .iter()
            .zip(&s.photons)
            .map(|(mode, &n)| HBAR * mode.omega.si() * (n as f64 + 0.5))
            .sum()
    });
    HamiltonianMatrix::new(m, basis.clone(), vec![Term::Field])
}

/// Σ_k g_k (a_k† S⁻ + a_k S⁺) in the rotating-wave form.
pub fn build_interaction(
    ensemble: &TwoLevelEnsemble,
    modes: &CavityModeSet,
    basis: &CollectiveBasis,
) -> Result<HamiltonianMatrix> {
    build_interaction_with(ensemble, modes, basis, CouplingForm::RotatingWave)
}

pub fn build_interaction_with(
    ensemble: &TwoLevelEnsemble,
    modes: &CavityModeSet,
    basis: &CollectiveBasis,
    form: CouplingForm,
) -> Result<HamiltonianMatrix> {
    check_basis(ensemble, basis)?;
    check_modes(modes, basis)?;
    let dim = basis.dimension();
    let s_total = basis.total_spin();
    let cutoff = basis.cutoff();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);

    // <m+1| S⁺ |m> = √(S(S+1) − m(m+1))
    let raise = |m: f64| (s_total * (s_total + 1.0) - m * (m + 1.0)).max(0.0).sqrt();

    for col in 0..dim {
        let s = basis.state(col);
        let m = basis.m(s.spin_index);
        for (k, mode) in modes.modes().iter().enumerate() {
            let g = mode.coupling.si();
            if g == 0.0 {
                continue;
            }
            let n = s.photons[k];
            // a S⁺ : absorb a photon, raise the spin
            if s.spin_index < basis.n_molecules() && n > 0 {
                let mut t = s.clone();
                t.spin_index += 1;
                t.photons[k] -= 1;
                h[(basis.index(&t), col)] += g * raise(m) * (n as f64).sqrt();
            }
            // a† S⁻ : emit a photon, lower the spin
            if s.spin_index > 0 && n < cutoff {
                let mut t = s.clone();
                t.spin_index -= 1;
                t.photons[k] += 1;
                h[(basis.index(&t), col)] += g * raise(m - 1.0) * ((n + 1) as f64).sqrt();
            }
            if form == CouplingForm::Full {
                // a† S⁺
                if s.spin_index < basis.n_molecules() && n < cutoff {
                    let mut t = s.clone();
                    t.spin_index += 1;
                    t.photons[k] += 1;
                    h[(basis.index(&t), col)] += g * raise(m) * ((n + 1) as f64).sqrt();
                }
                // a S⁻
                if s.spin_index > 0 && n > 0 {
                    let mut t = s.clone();
                    t.spin_index -= 1;
                    t.photons[k] -= 1;
                    h[(basis.index(&t), col)] += g * raise(m - 1.0) * (n as f64).sqrt();
                }
            }
        }
    }
    HamiltonianMatrix::new(h, basis.clone(), vec![Term::Interaction])
}

/// H_WM + H_EM + H_I in the rotating-wave form.
pub fn build_total(
    ensemble: &TwoLevelEnsemble,
    modes: &CavityModeSet,
    basis: &CollectiveBasis,
) -> Result<HamiltonianMatrix> {
    build_total_with(ensemble, modes, basis, CouplingForm::RotatingWave)
}

pub fn build_total_with(
    ensemble: &TwoLevelEnsemble,
    modes: &CavityModeSet,
    basis: &CollectiveBasis,
    form: CouplingForm,
) -> Result<HamiltonianMatrix> {
    let h = build_hwm(ensemble, basis)?
        .sum(&build_hem(modes, basis)?)
        .sum(&build_interaction_with(ensemble, modes, basis, form)?);
    h.check_hermitian()?;
    Ok(h)
}

/// Diagonal of N_exc = Σ_k n_k + S_z + N/2.
pub fn excitation_operator(basis: &CollectiveBasis) -> Vec<f64> {
    basis
        .states()
        .map(|s| s.photons.iter().sum::<usize>() as f64 + s.spin_index as f64)
        .collect()
}
