use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::eigen::{eigensolve, Eigenpairs};
use super::grid::Grid2D;
use super::pes::{Surface, Symmetry};
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// Minimum projection weight onto the assigned transverse level.
pub const MIN_LABEL_WEIGHT: f64 = 0.5;
/// Minimum |⟨ψ|P|ψ⟩| for a state to count as having definite parity.
pub const MIN_PARITY: f64 = 0.9;
const MAX_STATES: usize = 96;

/// Parity and transverse assignment of one eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateLabel {
    pub energy: f64,
    /// ⟨ψ|P|ψ⟩ for the surface's reflection.
    pub parity_expectation: f64,
    /// +1 symmetric in ξ, −1 antisymmetric.
    pub xi_parity: i8,
    /// Transverse quantum number.
    pub transverse: usize,
    /// Weight of ψ on that transverse level.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Doublet {
    pub n: usize,
    /// J
    pub symmetric_energy: f64,
    /// J
    pub antisymmetric_energy: f64,
    /// J, antisymmetric minus symmetric.
    pub splitting: f64,
    pub symmetric_state: usize,
    pub antisymmetric_state: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingSpectrum {
    pub doublets: Vec<Doublet>,
    pub labels: Vec<StateLabel>,
    pub grid: Grid2D,
}

impl SplittingSpectrum {
    pub fn splittings(&self) -> Vec<f64> {
        self.doublets.iter().map(|d| d.splitting).collect()
    }

    /// ΔE_n / ΔE_0.
    pub fn ratios(&self) -> Vec<f64> {
        let s = self.splittings();
        s.iter().map(|v| v / s[0]).collect()
    }
}

/// Lowest transverse eigenvectors of each ξ-slice of the grid Hamiltonian.
struct TransverseBasis {
    n_eta: usize,
    levels: usize,
    /// slices[i][ν * n_eta + j]
    slices: Vec<Vec<f64>>,
}

impl TransverseBasis {
    fn new(surface: &impl Surface, grid: &Grid2D, levels: usize) -> Self {
        let ny = grid.n_eta;
        let t = HBAR * HBAR / (2.0 * surface.mass_eta() * grid.h_eta().powi(2));
        let slices = (0..grid.n_xi)
            .map(|i| {
                let xi = grid.xi(i);
                let mut m = DMatrix::<f64>::zeros(ny, ny);
                for j in 0..ny {
                    m[(j, j)] = surface.potential(xi, grid.eta(j)) + 2.0 * t;
                    if j + 1 < ny {
                        m[(j, j + 1)] = -t;
                        m[(j + 1, j)] = -t;
                    }
                }
                let eig = SymmetricEigen::new(m);
                let mut order: Vec<usize> = (0..ny).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let mut out = Vec::with_capacity(levels * ny);
                for &c in order.iter().take(levels) {
                    out.extend(eig.eigenvectors.column(c).iter());
                }
                out
            })
            .collect();
        Self { n_eta: ny, levels, slices }
    }

    /// Σ_ξ |⟨χ_ν(ξ)|ψ(ξ, ·)⟩|² for each ν.
    fn weights(&self, psi: &[f64]) -> Vec<f64> {
        let ny = self.n_eta;
        let mut w = vec![0.0; self.levels];
        for (i, basis) in self.slices.iter().enumerate() {
            let row = &psi[i * ny..(i + 1) * ny];
            for (nu, wn) in w.iter_mut().enumerate() {
                let chi = &basis[nu * ny..(nu + 1) * ny];
                let p: f64 = chi.iter().zip(row).map(|(a, b)| a * b).sum();
                *wn += p * p;
            }
        }
        w
    }
}

fn reflected_overlap(grid: &Grid2D, psi: &[f64], flip_eta: bool) -> f64 {
    let (nx, ny) = (grid.n_xi, grid.n_eta);
    let mut s = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let jr = if flip_eta { ny - 1 - j } else { j };
            s += psi[i * ny + j] * psi[(nx - 1 - i) * ny + jr];
        }
    }
    s
}

/// Parity and transverse label for each state in `pairs`.
pub fn label_states(surface: &impl Surface, pairs: &Eigenpairs, levels: usize) -> Result<Vec<StateLabel>> {
    let grid = &pairs.grid;
    if !grid.is_symmetric() {
        return Err(Error::invalid("grid", "parity labels need extents symmetric about zero"));
    }
    let symmetry = surface.symmetry();
    if symmetry == Symmetry::None {
        return Err(Error::invalid("surface", "no reflection symmetry to pair doublets by"));
    }
    let basis = TransverseBasis::new(surface, grid, levels);
    Ok(pairs
        .energies
        .iter()
        .zip(&pairs.vectors)
        .map(|(&energy, psi)| {
            let w = basis.weights(psi);
            let (transverse, weight) =
                w.iter().cloned().enumerate().fold((0, f64::NEG_INFINITY), |a, (k, v)| if v > a.1 { (k, v) } else { a });
            let parity_expectation = reflected_overlap(grid, psi, symmetry == Symmetry::Inversion);
            let mut sign = parity_expectation.signum();
            if symmetry == Symmetry::Inversion && transverse % 2 == 1 {
                sign = -sign;
            }
            StateLabel { energy, parity_expectation, xi_parity: sign as i8, transverse, weight }
        })
        .collect())
}

/// Pairs the lowest symmetric and antisymmetric state of each transverse
/// level n ≤ `n_max`.
pub fn pair_doublets(labels: &[StateLabel], n_max: usize) -> Result<Vec<Doublet>> {
    let mut doublets = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let find = |parity: i8| labels.iter().position(|l| l.transverse == n && l.xi_parity == parity);
        let (Some(s), Some(a)) = (find(1), find(-1)) else {
            return Err(Error::PairingAmbiguity {
                level: n,
                reason: format!("no complete doublet among the lowest {} states", labels.len()),
            });
        };
        for &k in &[s, a] {
            let l = labels[k];
            if l.weight < MIN_LABEL_WEIGHT {
                return Err(Error::PairingAmbiguity {
                    level: n,
                    reason: format!("state {k} has only {:.3} weight on its transverse level", l.weight),
                });
            }
            if l.parity_expectation.abs() < MIN_PARITY {
                return Err(Error::PairingAmbiguity {
                    level: n,
                    reason: format!("state {k} has mixed parity ({:.3})", l.parity_expectation),
                });
            }
        }
        doublets.push(Doublet {
            n,
            symmetric_energy: labels[s].energy,
            antisymmetric_energy: labels[a].energy,
            splitting: labels[a].energy - labels[s].energy,
            symmetric_state: s,
            antisymmetric_state: a,
        });
    }
    Ok(doublets)
}

/// Tunnelling splitting for each transverse quantum number 0..=n_max.
pub fn splitting_spectrum(surface: &impl Surface, grid: &Grid2D, n_max: usize) -> Result<SplittingSpectrum> {
    let levels = n_max + 4;
    let cap = MAX_STATES.min(grid.len() / 4);
    let mut n_states = (2 * (n_max + 1) + 4).max(4 * (n_max + 1)).min(cap);
    loop {
        let pairs = eigensolve(surface, grid, n_states)?;
        let labels = label_states(surface, &pairs, levels)?;
        match pair_doublets(&labels, n_max) {
            Ok(doublets) => return Ok(SplittingSpectrum { doublets, labels, grid: *grid }),
            Err(Error::PairingAmbiguity { reason, .. }) if reason.starts_with("no complete") && n_states < cap => {
                n_states = (n_states + 8).min(cap);
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeEffect {
    Neutral,
    Promoting,
    Suppressing,
    Oscillating,
}

/// Shape of ΔE_n/ΔE_0 against n. Fewer than two levels is Neutral.
pub fn classify_mode_effect(splittings: &[f64], tol: f64) -> ModeEffect {
    if splittings.len() < 2 {
        return ModeEffect::Neutral;
    }
    let r: Vec<f64> = splittings.iter().map(|v| v / splittings[0]).collect();
    if r.iter().all(|v| (v - 1.0).abs() < tol) {
        return ModeEffect::Neutral;
    }
    let steps: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.iter().all(|&d| d > -tol) && steps.iter().any(|&d| d > tol) {
        ModeEffect::Promoting
    } else if steps.iter().all(|&d| d < tol) && steps.iter().any(|&d| d < -tol) {
        ModeEffect::Suppressing
    } else {
        ModeEffect::Oscillating
    }
}

/// Splittings on a grid and on one with about half the points per axis,
/// with the Richardson error estimate for the finer one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEstimate {
    pub fine: Vec<f64>,
    pub coarse: Vec<f64>,
    /// |ΔE_n(h) − ΔE_n(rh)| / (r² − 1)
    pub richardson: Vec<f64>,
    /// |ΔE_n(h) − ΔE_n(rh)| / ΔE_n(h)
    pub relative_change: Vec<f64>,
}

impl ConvergenceEstimate {
    pub fn max_error(&self) -> f64 {
        self.richardson.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn grid_convergence(surface: &impl Surface, grid: &Grid2D, n_max: usize) -> Result<ConvergenceEstimate> {
    let coarse_grid = grid.scaled(0.5)?;
    let fine = splitting_spectrum(surface, grid, n_max)?.splittings();
    let coarse = splitting_spectrum(surface, &coarse_grid, n_max)?.splittings();
    let r = coarse_grid.h_xi() / grid.h_xi();
    let richardson = fine.iter().zip(&coarse).map(|(f, c)| (f - c).abs() / (r * r - 1.0)).collect();
    let relative_change = fine.iter().zip(&coarse).map(|(f, c)| (f - c).abs() / f.abs()).collect();
    Ok(ConvergenceEstimate { fine, coarse, richardson, relative_change })
}
