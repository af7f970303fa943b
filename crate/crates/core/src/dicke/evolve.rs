use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{HamiltonianMatrix, QuantumState};
use crate::constants::HBAR;
use crate::error::{Error, Result};

/// Above this dimension the propagator switches from a full eigendecomposition
/// to a scaled-and-squared matrix exponential of one step.
pub const EIGEN_DIMENSION_LIMIT: usize = 512;

const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagatorMethod {
    #[default]
    Auto,
    Eigen,
    Expm,
}

/// exp(−iHt/ħ) for a fixed Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator {
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Eigen {
        // Shifted by their mean; only a global phase.
        values: DVector<f64>,
        vectors: DMatrix<Complex64>,
    },
    Expm {
        step: DMatrix<Complex64>,
        dt: f64,
    },
}

impl Propagator {
    pub fn new(h: &HamiltonianMatrix, dt: f64, method: PropagatorMethod) -> Result<Self> {
        h.check_hermitian()?;
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("dt", "time step must be finite and > 0"));
        }
        let use_eigen = match method {
            PropagatorMethod::Auto => h.dimension() <= EIGEN_DIMENSION_LIMIT,
            PropagatorMethod::Eigen => true,
            PropagatorMethod::Expm => false,
        };
        let kind = if use_eigen {
            let eig = h.matrix().clone().symmetric_eigen();
            let offset = eig.eigenvalues.mean();
            Kind::Eigen { values: eig.eigenvalues.map(|v| v - offset), vectors: eig.eigenvectors }
        } else {
            let scaled = h.matrix() * Complex64::new(0.0, -dt / HBAR);
            Kind::Expm { step: scaled.exp(), dt }
        };
        Ok(Self { kind })
    }

    pub fn is_eigen(&self) -> bool {
        matches!(self.kind, Kind::Eigen { .. })
    }

    /// Amplitudes at times k·dt, k = 0..=steps.
    fn trajectory(&self, psi0: &DVector<Complex64>, dt: f64, steps: usize) -> Vec<DVector<Complex64>> {
        match &self.kind {
            Kind::Eigen { values, vectors } => {
                let coeffs = vectors.adjoint() * psi0;
                (0..=steps)
                    .map(|k| {
                        let t = k as f64 * dt;
                        let phased = DVector::from_iterator(
                            coeffs.len(),
                            coeffs
                                .iter()
                                .zip(values.iter())
                                .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t / HBAR)),
                        );
                        vectors * phased
                    })
                    .collect()
            }
            Kind::Expm { step, .. } => {
                let mut out = Vec::with_capacity(steps + 1);
                let mut psi = psi0.clone();
                out.push(psi.clone());
                for _ in 0..steps {
                    psi = step * &psi;
                    out.push(psi.clone());
                }
                out
            }
        }
    }

    fn step_dt(&self) -> Option<f64> {
        match self.kind {
            Kind::Expm { dt, .. } => Some(dt),
            Kind::Eigen { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// max_t |‖ψ(t)‖ − 1|
    pub max_norm_drift: f64,
}

/// Unitary evolution sampled at t = 0, dt, ..., t_final.
pub fn evolve(state: &QuantumState, h: &HamiltonianMatrix, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_with(state, h, t_final, dt, PropagatorMethod::Auto)
}

pub fn evolve_with(
    state: &QuantumState,
    h: &HamiltonianMatrix,
    t_final: f64,
    dt: f64,
    method: PropagatorMethod,
) -> Result<Trajectory> {
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::invalid("t_final", "final time must be finite and >= 0"));
    }
    if state.basis() != h.basis() {
        return Err(Error::DimensionMismatch { state: state.basis().dimension(), basis: h.dimension() });
    }
    if (state.norm() - 1.0).abs() > NORM_TOL {
        return Err(Error::invalid("state", format!("state is not normalised (norm {})", state.norm())));
    }
    let propagator = Propagator::new(h, dt, method)?;
    debug_assert!(propagator.step_dt().is_none_or(|s| s == dt));
    let steps = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    let amps = propagator.trajectory(state.amplitudes(), dt, steps);
    let mut max_norm_drift = 0.0_f64;
    let states = amps
        .into_iter()
        .map(|a| {
            max_norm_drift = max_norm_drift.max((a.norm() - 1.0).abs());
            QuantumState::from_vector(state.basis().clone(), a)
        })
        .collect();
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    Ok(Trajectory { times, states, max_norm_drift })
}
