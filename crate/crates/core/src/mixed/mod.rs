//! Tunnelling splittings on a two-dimensional surface: a double well along
//! the reaction coordinate ξ coupled to a transverse vibration η.

pub mod eigen;
pub mod grid;
pub mod pes;
pub mod regions;
pub mod splitting;

pub use eigen::{eigensolve, Eigenpairs, GridHamiltonian};
pub use grid::Grid2D;
pub use pes::{build_pes, CouplingForm, Pes2D, PesSpec, Preset, Surface, Symmetry};
pub use regions::{classify_regions, Region, RegionMap};
pub use splitting::{
    classify_mode_effect, grid_convergence, splitting_spectrum, ConvergenceEstimate, Doublet, ModeEffect,
    SplittingSpectrum,
};

/// Relative tolerance on ΔE_n/ΔE_0 used to call a mode neutral.
pub const DEFAULT_EFFECT_TOL: f64 = 0.01;
