use serde::Serialize;

use crate::error::{Error, Result};

/// Product basis of the symmetric spin sector S = N/2 and a truncated Fock
/// space per cavity mode.
///
/// Flat index layout: the spin label is the slowest index, then the photon
/// numbers of mode 0, 1, ... with the last mode fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectiveBasis {
    n_molecules: usize,
    n_modes: usize,
    cutoff: usize,
    dimension: usize,
}

/// One product state: `spin_index` = m + N/2 ∈ {0..N}, and the photon number
/// in every mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisState {
    pub spin_index: usize,
    pub photons: Vec<usize>,
}

impl CollectiveBasis {
    pub fn new(n_molecules: usize, n_modes: usize, cutoff: usize) -> Result<Self> {
        if n_molecules == 0 {
            return Err(Error::invalid("n", "need at least one molecule"));
        }
        if n_modes == 0 {
            return Err(Error::invalid("modes", "need at least one cavity mode"));
        }
        if cutoff == 0 {
            return Err(Error::invalid("photon_cutoff", "cutoff must be >= 1"));
        }
        let fock = (cutoff + 1)
            .checked_pow(n_modes as u32)
            .ok_or_else(|| Error::invalid("photon_cutoff", "Fock space too large"))?;
        let dimension = (n_molecules + 1)
            .checked_mul(fock)
            .ok_or_else(|| Error::invalid("photon_cutoff", "Hilbert space too large"))?;
        Ok(Self { n_molecules, n_modes, cutoff, dimension })
    }

    pub fn n_molecules(&self) -> usize {
        self.n_molecules
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn total_spin(&self) -> f64 {
        self.n_molecules as f64 / 2.0
    }

    pub fn spin_dimension(&self) -> usize {
        self.n_molecules + 1
    }

    pub fn fock_dimension(&self) -> usize {
        self.dimension / self.spin_dimension()
    }

    /// Collective S_z eigenvalue for a spin label.
    pub fn m(&self, spin_index: usize) -> f64 {
        spin_index as f64 - self.total_spin()
    }

    pub fn index(&self, state: &BasisState) -> usize {
        debug_assert_eq!(state.photons.len(), self.n_modes);
        let fock = state
            .photons
            .iter()
            .fold(0, |acc, &n| acc * (self.cutoff + 1) + n);
        state.spin_index * self.fock_dimension() + fock
    }

    pub fn state(&self, index: usize) -> BasisState {
        let fock_dim = self.fock_dimension();
        let spin_index = index / fock_dim;
        let mut rest = index % fock_dim;
        let mut photons = vec![0; self.n_modes];
        for slot in photons.iter_mut().rev() {
            *slot = rest % (self.cutoff + 1);
            rest /= self.cutoff + 1;
        }
        BasisState { spin_index, photons }
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dimension).map(|i| self.state(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_is_product_formula() {
        for (n, modes, cut) in [(1, 1, 1), (3, 2, 4), (8, 1, 10), (5, 3, 2)] {
            let b = CollectiveBasis::new(n, modes, cut).unwrap();
            assert_eq!(b.dimension(), (n + 1) * (cut + 1).pow(modes as u32));
        }
    }

    #[test]
    fn index_maps_are_inverse() {
        let b = CollectiveBasis::new(4, 3, 3).unwrap();
        for i in 0..b.dimension() {
            let s = b.state(i);
            assert!(s.spin_index <= 4);
            assert!(s.photons.iter().all(|&n| n <= 3));
            assert_eq!(b.index(&s), i);
        }
    }

    #[test]
    fn spin_labels_are_symmetric() {
        let b = CollectiveBasis::new(3, 1, 1).unwrap();
        let ms: Vec<f64> = (0..4).map(|k| b.m(k)).collect();
        assert_eq!(ms, vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(CollectiveBasis::new(0, 1, 1).is_err());
        assert!(CollectiveBasis::new(1, 0, 1).is_err());
        assert!(CollectiveBasis::new(1, 1, 0).is_err());
    }
}
