use rayon::prelude::*;
use serde::Serialize;

use super::grid::Grid2D;
use super::pes::{Pes2D, Surface};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    /// Classically allowed: V ≤ E.
    R,
    /// Forbidden in ξ but the transverse channel is still classically open.
    C,
    /// No classical motion in any direction.
    I,
}

impl Region {
    pub fn as_char(self) -> char {
        match self {
            Region::R => 'R',
            Region::C => 'C',
            Region::I => 'I',
        }
    }
}

/// Labels on the grid, row-major in ξ (index = i_xi·n_eta + i_eta).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub grid: Grid2D,
    /// J
    pub e_total: f64,
    /// J
    pub e_eta_channel: f64,
    pub labels: Vec<Region>,
}

impl RegionMap {
    pub fn label(&self, i: usize, j: usize) -> Region {
        self.labels[self.grid.index(i, j)]
    }

    pub fn count(&self, region: Region) -> usize {
        self.labels.iter().filter(|&&l| l == region).count()
    }
}

/// Barrier points (V > E_total) are C when E_eta_channel exceeds the
/// transverse minimum at that ξ plus half the local transverse quantum.
pub fn classify_regions(pes: &Pes2D, e_total: f64, e_eta_channel: f64, grid: &Grid2D) -> Result<RegionMap> {
    if !(e_total > 0.0 && e_total.is_finite()) {
        return Err(Error::invalid("e_total", "must be finite and > 0"));
    }
    if !e_eta_channel.is_finite() {
        return Err(Error::invalid("e_eta_channel", "must be finite"));
    }
    let labels = (0..grid.n_xi)
        .into_par_iter()
        .flat_map_iter(|i| {
            let xi = grid.xi(i);
            let row: Vec<f64> = (0..grid.n_eta).map(|j| pes.potential(xi, grid.eta(j))).collect();
            let v_min = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let open = e_eta_channel > v_min + 0.5 * pes.local_transverse_quantum(xi);
            row.into_iter().map(move |v| {
                if v <= e_total {
                    Region::R
                } else if open {
                    Region::C
                } else {
                    Region::I
                }
            })
        })
        .collect();
    Ok(RegionMap { grid: *grid, e_total, e_eta_channel, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ELEMENTARY_CHARGE as EV;
    use crate::mixed::pes::{build_pes, Preset};

    fn setup(preset: Preset) -> (Pes2D, Grid2D) {
        let pes = build_pes(&preset.spec()).unwrap();
        let grid = Grid2D::for_pes(&pes, 128, 64).unwrap();
        (pes, grid)
    }

    #[test]
    fn everything_allowed_above_the_surface() {
        let (pes, grid) = setup(Preset::Neutral);
        let map = classify_regions(&pes, 1e3 * EV, 0.0, &grid).unwrap();
        assert_eq!(map.count(Region::R), grid.len());
    }

    #[test]
    fn separable_with_closed_channel_has_no_c_region() {
        let (pes, grid) = setup(Preset::Neutral);
        let map = classify_regions(&pes, 0.2 * EV, 0.0, &grid).unwrap();
        assert_eq!(map.count(Region::C), 0);
        // The barrier top row is entirely I.
        let mid = (0..grid.n_xi).min_by(|&a, &b| grid.xi(a).abs().total_cmp(&grid.xi(b).abs())).unwrap();
        assert!((0..grid.n_eta).all(|j| map.label(mid, j) == Region::I));
    }

    #[test]
    fn coupled_preset_nests_i_inside_c() {
        for preset in [Preset::Promoting, Preset::Suppressing] {
            let (pes, grid) = setup(preset);
            let map = classify_regions(&pes, 0.25 * EV, 0.25 * EV, &grid).unwrap();
            for r in [Region::R, Region::C, Region::I] {
                assert!(map.count(r) > 0, "{preset:?} {r:?}");
            }
            // Walk outward from the barrier top through the I band; the
            // first rows past it on both sides carry C points.
            let has = |i: usize, r: Region| (0..grid.n_eta).any(|j| map.label(i, j) == r);
            let pure_i = |i: usize| has(i, Region::I) && !has(i, Region::C);
            let mid = grid.n_xi / 2;
            assert!(pure_i(mid) && pure_i(mid - 1), "{preset:?}");
            let mut hi = mid;
            while pure_i(hi) {
                hi += 1;
            }
            let mut lo = mid - 1;
            while pure_i(lo) {
                lo -= 1;
            }
            assert!(has(hi, Region::C) && has(lo, Region::C), "{preset:?}");
        }
    }

    #[test]
    fn partition_and_r_set_are_exact() {
        let (pes, grid) = setup(Preset::Suppressing);
        let e = 0.18 * EV;
        let map = classify_regions(&pes, e, 0.1 * EV, &grid).unwrap();
        assert_eq!(map.count(Region::R) + map.count(Region::C) + map.count(Region::I), grid.len());
        for i in 0..grid.n_xi {
            for j in 0..grid.n_eta {
                let allowed = pes.potential(grid.xi(i), grid.eta(j)) <= e;
                assert_eq!(map.label(i, j) == Region::R, allowed);
            }
        }
    }

    #[test]
    fn nonpositive_energy_rejected() {
        let (pes, grid) = setup(Preset::Neutral);
        assert!(classify_regions(&pes, 0.0, 0.0, &grid).is_err());
    }
}
