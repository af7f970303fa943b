//! Lowest eigenpairs of the finite-difference Hamiltonian.
//!
//! H is the 5-point stencil plus the diagonal potential, in J. The lowest
//! states come from Lanczos on (H − σ)⁻¹ with σ below min V, so the shifted
//! matrix is positive definite and a banded Cholesky factor applies the
//! inverse.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::Grid2D;
use super::pes::Surface;
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// ‖Hψ − Eψ‖ must fall below this times ‖H‖∞.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest |ψ| on the outermost ring of grid points, relative to max |ψ|.
pub const BOUNDARY_LIMIT: f64 = 1e-8;
const TARGET_TOL: f64 = 1e-11;
const START_SEED: u64 = 0x005e_ed2d;

/// The sparse Hamiltonian: kinetic couplings plus the diagonal.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    pub grid: Grid2D,
    pub diagonal: Vec<f64>,
    /// −ħ²/(2 m_ξ h_ξ²)
    pub off_xi: f64,
    /// −ħ²/(2 m_η h_η²)
    pub off_eta: f64,
    pub min_potential: f64,
}

impl GridHamiltonian {
    pub fn new(surface: &impl Surface, grid: &Grid2D) -> Self {
        let t_xi = HBAR * HBAR / (2.0 * surface.mass_xi() * grid.h_xi().powi(2));
        let t_eta = HBAR * HBAR / (2.0 * surface.mass_eta() * grid.h_eta().powi(2));
        let mut diagonal = Vec::with_capacity(grid.len());
        let mut min_potential = f64::INFINITY;
        for i in 0..grid.n_xi {
            let xi = grid.xi(i);
            for j in 0..grid.n_eta {
                let v = surface.potential(xi, grid.eta(j));
                min_potential = min_potential.min(v);
                diagonal.push(v + 2.0 * t_xi + 2.0 * t_eta);
            }
        }
        Self { grid: *grid, diagonal, off_xi: -t_xi, off_eta: -t_eta, min_potential }
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.grid.n_xi, self.grid.n_eta);
        for i in 0..nx {
            for j in 0..ny {
                let k = i * ny + j;
                let mut s = self.diagonal[k] * x[k];
                if j > 0 {
                    s += self.off_eta * x[k - 1];
                }
                if j + 1 < ny {
                    s += self.off_eta * x[k + 1];
                }
                if i > 0 {
                    s += self.off_xi * x[k - ny];
                }
                if i + 1 < nx {
                    s += self.off_xi * x[k + ny];
                }
                y[k] = s;
            }
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let off = 2.0 * (self.off_xi.abs() + self.off_eta.abs());
        self.diagonal.iter().map(|d| d.abs() + off).fold(0.0, f64::max)
    }

    fn kinetic_scale(&self) -> f64 {
        self.off_xi.abs().min(self.off_eta.abs())
    }
}

/// Cholesky factor of a symmetric positive definite band matrix, stored as
/// `band[k * (b + 1) + d] = L[k][k − d]`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    b: usize,
    band: Vec<f64>,
}

impl BandedCholesky {
    /// Factors H − σ.
    pub fn factor(h: &GridHamiltonian, sigma: f64) -> Result<Self> {
        let n = h.dim();
        let b = h.grid.n_eta;
        let w = b + 1;
        let mut band = vec![0.0; n * w];
        for k in 0..n {
            band[k * w] = h.diagonal[k] - sigma;
            if k % b != 0 {
                band[k * w + 1] = h.off_eta;
            }
            if k >= b {
                band[k * w + b] = h.off_xi;
            }
        }
        for k in 0..n {
            let lo = k.saturating_sub(b);
            for jcol in lo..k {
                // L[k][j] = (A[k][j] − Σ_{p<j} L[k][p] L[j][p]) / L[j][j]
                let d_kj = k - jcol;
                let p_lo = lo.max(jcol.saturating_sub(b));
                let mut s = band[k * w + d_kj];
                for p in p_lo..jcol {
                    s -= band[k * w + (k - p)] * band[jcol * w + (jcol - p)];
                }
                band[k * w + d_kj] = s / band[jcol * w];
            }
            let mut s = band[k * w];
            for p in lo..k {
                let l = band[k * w + (k - p)];
                s -= l * l;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::NotPositiveDefinite { row: k });
            }
            band[k * w] = s.sqrt();
        }
        Ok(Self { n, b, band })
    }

    /// Overwrites `x` with A⁻¹x.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, x: &mut [f64]) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        for k in 0..n {
            let mut s = x[k];
            for p in k.saturating_sub(b)..k {
                s -= self.band[k * w + (k - p)] * x[p];
            }
            x[k] = s / self.band[k * w];
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for r in k + 1..(k + b + 1).min(n) {
                s -= self.band[r * w + (r - k)] * x[r];
            }
            x[k] = s / self.band[k * w];
        }
    }
}

/// Eigenpairs sorted by energy; vectors have unit Euclidean norm.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub grid: Grid2D,
    /// J
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// ‖Hψ − Eψ‖ / ‖H‖∞ per state.
    pub residuals: Vec<f64>,
    pub boundary_amplitudes: Vec<f64>,
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Max |ψ| on the outermost ring relative to max |ψ|.
pub fn boundary_amplitude(grid: &Grid2D, psi: &[f64]) -> f64 {
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (nx, ny) = (grid.n_xi, grid.n_eta);
    let mut edge = 0.0f64;
    for i in 0..nx {
        for j in 0..ny {
            if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                edge = edge.max(psi[i * ny + j].abs());
            }
        }
    }
    edge / peak
}

/// The `n_states` lowest eigenpairs of the surface on the grid. Fails with
/// `GridTooSmall` if any returned state reaches the walls.
pub fn eigensolve(surface: &impl Surface, grid: &Grid2D, n_states: usize) -> Result<Eigenpairs> {
    let pairs = lowest_eigenpairs(&GridHamiltonian::new(surface, grid), n_states)?;
    for (state, &amp) in pairs.boundary_amplitudes.iter().enumerate() {
        if amp > BOUNDARY_LIMIT {
            return Err(Error::GridTooSmall { state, amplitude: amp, limit: BOUNDARY_LIMIT });
        }
    }
    Ok(pairs)
}

/// Shift-invert Lanczos with full reorthogonalisation; no boundary check.
pub fn lowest_eigenpairs(h: &GridHamiltonian, n_states: usize) -> Result<Eigenpairs> {
    let grid = &h.grid;
    let n = h.dim();
    if n_states == 0 || n_states > n / 4 {
        return Err(Error::invalid("n_states", "must be between 1 and a quarter of the grid size"));
    }
    let h_norm = h.norm_inf();
    let mut delta = 0.01 * h.kinetic_scale();
    let chol = loop {
        match BandedCholesky::factor(h, h.min_potential - delta) {
            Ok(c) => break c,
            Err(e) if delta > h_norm => return Err(e),
            Err(_) => delta *= 4.0,
        }
    };
    let sigma = h.min_potential - delta;

    let max_iter = n.min(n_states * 12 + 200);
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|v| *v /= q_norm);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut hv = vec![0.0; n];
    let mut best_worst = f64::INFINITY;

    loop {
        let m = basis.len();
        let mut w = basis[m - 1].clone();
        chol.solve(&mut w);
        let a = dot(&w, &basis[m - 1]);
        alpha.push(a);
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for qv in &basis {
                let c = dot(&w, qv);
                w.iter_mut().zip(qv).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);

        let check = m >= n_states + 4 && (m.is_multiple_of(8) || m >= max_iter || b < 1e-300);
        if check {
            let (energies, vectors) = ritz(&basis, &alpha, &beta, sigma, n_states);
            let mut residuals = Vec::with_capacity(n_states);
            for (e, v) in energies.iter().zip(&vectors) {
                h.apply(v, &mut hv);
                let r: f64 = hv.iter().zip(v).map(|(x, y)| (x - e * y).powi(2)).sum::<f64>().sqrt();
                residuals.push(r / h_norm);
            }
            let worst = residuals.iter().cloned().fold(0.0, f64::max);
            best_worst = best_worst.min(worst);
            let done = worst < TARGET_TOL || m >= max_iter || b < 1e-300;
            if done {
                if worst >= RESIDUAL_TOL {
                    return Err(Error::EigenNotConverged { residual: best_worst, tolerance: RESIDUAL_TOL });
                }
                let boundary: Vec<f64> = vectors.iter().map(|v| boundary_amplitude(grid, v)).collect();
                return Ok(Eigenpairs {
                    grid: *grid,
                    energies,
                    vectors,
                    residuals,
                    boundary_amplitudes: boundary,
                });
            }
        }
        beta.push(b);
        w.iter_mut().for_each(|v| *v /= b);
        basis.push(w);
    }
}

/// Ritz pairs of the Lanczos tridiagonal mapped back to H, lowest first,
/// with energies refined as Rayleigh quotients by the caller's residual pass.
fn ritz(basis: &[Vec<f64>], alpha: &[f64], beta: &[f64], sigma: f64, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    // Largest θ = 1/(E − σ) is the lowest E.
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = basis[0].len();
    let mut energies = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let mut v = vec![0.0; n];
        for (i, q) in basis.iter().take(m).enumerate() {
            let s = eig.eigenvectors[(i, c)];
            v.iter_mut().zip(q).for_each(|(x, y)| *x += s * y);
        }
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        energies.push(sigma + 1.0 / eig.eigenvalues[c]);
        vectors.push(v);
    }
    (energies, vectors)
}
