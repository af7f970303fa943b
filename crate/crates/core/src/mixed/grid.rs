use serde::Serialize;

use super::pes::Pes2D;
use crate::constants::HBAR;
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 32;

/// Uniform grid of interior points; the wavefunction vanishes on the
/// bounding rectangle (Dirichlet). Flat index = i_xi·n_eta + i_eta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid2D {
    pub n_xi: usize,
    pub n_eta: usize,
    /// (lo, hi) in m; the walls, not the first/last interior points.
    pub xi_range: (f64, f64),
    pub eta_range: (f64, f64),
}

impl Grid2D {
    pub fn new(n_xi: usize, n_eta: usize, xi_range: (f64, f64), eta_range: (f64, f64)) -> Result<Self> {
        if n_xi < MIN_POINTS || n_eta < MIN_POINTS {
            return Err(Error::invalid("grid", format!("need at least {MIN_POINTS} points per axis")));
        }
        for (name, (lo, hi)) in [("xi_range", xi_range), ("eta_range", eta_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(name, "need finite lo < hi"));
            }
        }
        Ok(Self { n_xi, n_eta, xi_range, eta_range })
    }

    /// Symmetric extents sized from the surface: ξ reaches seven well
    /// oscillator lengths past ξ₀, η covers the coupling-induced shift plus
    /// nine transverse oscillator lengths.
    pub fn for_pes(pes: &Pes2D, n_xi: usize, n_eta: usize) -> Result<Self> {
        let l_xi = (HBAR / (pes.mass_xi * pes.well_frequency())).sqrt();
        let xi_max = pes.xi0 + 7.0 * l_xi;
        let l_eta = (HBAR / (pes.mass_eta * pes.omega_eta)).sqrt();
        let eta_max = pes.transverse_shift(xi_max) + 9.0 * l_eta;
        Self::new(n_xi, n_eta, (-xi_max, xi_max), (-eta_max, eta_max))
    }

    pub fn len(&self) -> usize {
        self.n_xi * self.n_eta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h_xi(&self) -> f64 {
        (self.xi_range.1 - self.xi_range.0) / (self.n_xi + 1) as f64
    }

    pub fn h_eta(&self) -> f64 {
        (self.eta_range.1 - self.eta_range.0) / (self.n_eta + 1) as f64
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.xi_range.0 + (i + 1) as f64 * self.h_xi()
    }

    pub fn eta(&self, j: usize) -> f64 {
        self.eta_range.0 + (j + 1) as f64 * self.h_eta()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_eta + j
    }

    pub fn is_symmetric(&self) -> bool {
        let sym = |(lo, hi): (f64, f64)| (lo + hi).abs() <= 1e-12 * (hi - lo);
        sym(self.xi_range) && sym(self.eta_range)
    }

    /// Same extents with the point counts scaled by `factor` (rounded).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let scale = |n: usize| ((n + 1) as f64 * factor).round() as usize - 1;
        Self::new(scale(self.n_xi), scale(self.n_eta), self.xi_range, self.eta_range)
    }
}
