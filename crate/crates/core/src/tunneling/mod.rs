//! Trigger rates for vesicle release: thermal activation over a barrier and
//! one-dimensional semiclassical tunnelling through it.

mod barrier;
pub mod quadrature;

pub use barrier::{read_tabulated_csv, BarrierForm, BarrierPotential, MonotoneCubic};

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{BOLTZMANN, DEUTERON_MASS, ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR, PROTON_MASS, TRITON_MASS};
use crate::error::{Error, Result};
use crate::units::{Energy, Length, Mass, Rate, Temperature};

/// Relative tolerance the action quadrature is driven to.
pub const ACTION_REL_TOL: f64 = 1e-12;
/// Largest relative change still accepted when panel doubling stalls.
pub const ACTION_ACCEPT_TOL: f64 = 1e-8;
const ROOT_SAMPLES: usize = 4096;
const ZERO_POINT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalModel {
    /// Coupling / attempt prefactor, 1/s.
    pub v_c: f64,
    pub e_a: Energy,
    pub t: Temperature,
}

impl ThermalModel {
    pub fn new(v_c: f64, e_a: Energy, t: Temperature) -> Result<Self> {
        if !(v_c > 0.0 && v_c.is_finite()) {
            return Err(Error::invalid("v_c", "prefactor must be finite and > 0"));
        }
        if !(e_a.si() >= 0.0 && e_a.si().is_finite()) {
            return Err(Error::invalid("e_a", "activation energy must be >= 0"));
        }
        if !(t.si() > 0.0 && t.si().is_finite()) {
            return Err(Error::invalid("t", "temperature must be > 0"));
        }
        Ok(Self { v_c, e_a, t })
    }
}

/// k = V_C·exp(−E_A/(k_B T))
pub fn arrhenius_rate(model: &ThermalModel) -> Rate {
    Rate::from_si(model.v_c * (-model.e_a.si() / (BOLTZMANN * model.t.si())).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TunnelingProblem {
    mass: Mass,
    energy: Energy,
    barrier: BarrierPotential,
    omega_0: f64,
    delta_q: Option<Length>,
}

/// ω₀ = E₀/ħ with E₀ = ħ²/(2mΔq²), the zero-point energy of a particle of
/// mass m localised over Δq.
pub fn attempt_frequency(mass: Mass, delta_q: Length) -> f64 {
    HBAR / (2.0 * mass.si() * delta_q.si() * delta_q.si())
}

impl TunnelingProblem {
    /// At least one of `omega_0` and `delta_q` is required; when both are
    /// given they must satisfy the zero-point relation.
    pub fn new(
        mass: Mass,
        energy: Energy,
        barrier: BarrierPotential,
        omega_0: Option<f64>,
        delta_q: Option<Length>,
    ) -> Result<Self> {
        if !(mass.si() > 0.0 && mass.si().is_finite()) {
            return Err(Error::invalid("mass", "must be finite and > 0"));
        }
        if !(energy.si() >= 0.0 && energy.si().is_finite()) {
            return Err(Error::invalid("energy", "must be finite and >= 0"));
        }
        if let Some(dq) = delta_q {
            if !(dq.si() > 0.0 && dq.si().is_finite()) {
                return Err(Error::invalid("delta_q", "must be finite and > 0"));
            }
        }
        let omega_0 = match (omega_0, delta_q) {
            (None, None) => return Err(Error::invalid("omega_0", "give omega_0 or delta_q")),
            (Some(w), None) => w,
            (None, Some(dq)) => attempt_frequency(mass, dq),
            (Some(w), Some(dq)) => {
                let expected = attempt_frequency(mass, dq);
                if ((w - expected) / expected).abs() > ZERO_POINT_REL_TOL {
                    return Err(Error::InconsistentAttemptFrequency { given: w, expected });
                }
                w
            }
        };
        if !(omega_0 > 0.0 && omega_0.is_finite()) {
            return Err(Error::invalid("omega_0", "must be finite and > 0"));
        }
        Ok(Self { mass, energy, barrier, omega_0, delta_q })
    }

    pub fn mass(&self) -> Mass {
        self.mass
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    pub fn barrier(&self) -> &BarrierPotential {
        &self.barrier
    }

    pub fn omega_0(&self) -> f64 {
        self.omega_0
    }

    pub fn delta_q(&self) -> Option<Length> {
        self.delta_q
    }

    pub fn with_mass(&self, mass: Mass) -> Result<Self> {
        let omega = if self.delta_q.is_some() { None } else { Some(self.omega_0) };
        Self::new(mass, self.energy, self.barrier.clone(), omega, self.delta_q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints {
    pub a: f64,
    pub b: f64,
}

/// Classical turning points bounding the single region where V(q) > E.
pub fn find_turning_points(v: &BarrierPotential, e: f64) -> Result<TurningPoints> {
    let max = v.max_value();
    if e >= max {
        return Err(Error::NoBarrier { energy: e, max });
    }
    let (lo, hi) = v.domain();

    if let BarrierForm::Rectangular { width, .. } = v.form() {
        // Edges are known; V outside is zero.
        if e < 0.0 {
            return Err(Error::BarrierAtDomainEdge { edge: lo });
        }
        return Ok(TurningPoints { a: -0.5 * width, b: 0.5 * width });
    }

    let f = |q: f64| v.eval(q) - e;
    if f(lo) > 0.0 {
        return Err(Error::BarrierAtDomainEdge { edge: lo });
    }
    if f(hi) > 0.0 {
        return Err(Error::BarrierAtDomainEdge { edge: hi });
    }
    // Uniform samples plus the peak, so a sliver just under the top is seen.
    let step = (hi - lo) / ROOT_SAMPLES as f64;
    let mut grid: Vec<f64> = (0..ROOT_SAMPLES).map(|i| lo + i as f64 * step).chain([hi]).collect();
    let peak = v.argmax();
    if peak > lo && peak < hi {
        let at = grid.partition_point(|&q| q < peak);
        if grid[at] != peak {
            grid.insert(at, peak);
        }
    }

    let mut intervals = Vec::new();
    let mut start = None;
    let mut prev = f(lo);
    for w in grid.windows(2) {
        let cur = f(w[1]);
        if prev <= 0.0 && cur > 0.0 {
            start = Some((w[0], w[1]));
        } else if prev > 0.0 && cur <= 0.0 {
            if let Some(s) = start.take() {
                intervals.push((s, (w[0], w[1])));
            }
        }
        prev = cur;
    }
    match intervals.len() {
        0 => Err(Error::NoBarrier { energy: e, max }),
        1 => {
            let ((a0, a1), (b0, b1)) = intervals[0];
            let a = bisect(&f, a0, a1);
            let b = bisect(&f, b0, b1);
            Ok(TurningPoints { a, b })
        }
        count => Err(Error::MultiBarrier { count }),
    }
}

/// Bisection on a sign change; returns the endpoint closest to the root once
/// the bracket can no longer be split.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    if flo.abs() <= fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Θ = (2/ħ) ∫_a^b √(2m(V(q) − E)) dq.
///
/// The substitution q = a + (b − a)·sin²θ removes the square-root zeros at
/// both turning points; the θ-integral is smooth and handled by composite
/// Gauss–Legendre with panel doubling.
pub fn wkb_action(problem: &TunnelingProblem) -> Result<f64> {
    let e = problem.energy.si();
    let tp = find_turning_points(&problem.barrier, e)?;
    let two_m = 2.0 * problem.mass.si();
    let span = tp.b - tp.a;
    let integrand = |theta: f64| {
        let s = theta.sin();
        let q = tp.a + span * s * s;
        let dv = (problem.barrier.eval(q) - e).max(0.0);
        (two_m * dv).sqrt() * span * (2.0 * theta).sin()
    };
    let integral = quadrature::integrate_adaptive(integrand, 0.0, FRAC_PI_2, ACTION_REL_TOL, ACTION_ACCEPT_TOL)?;
    Ok(2.0 * integral / HBAR)
}

/// Closed-form action for a rectangular barrier: 2w√(2m(ΔV − E))/ħ.
pub fn rectangular_action(mass: f64, height: f64, width: f64, energy: f64) -> f64 {
    2.0 * width * (2.0 * mass * (height - energy)).sqrt() / HBAR
}

/// k = ω₀·exp(−Θ)
pub fn wkb_rate(problem: &TunnelingProblem) -> Result<Rate> {
    Ok(Rate::from_si(problem.omega_0 * (-wkb_action(problem)?).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Particle {
    Electron,
    Protium,
    Deuterium,
    Tritium,
}

impl Particle {
    /// Bare particle / nuclear mass.
    pub fn mass(self) -> Mass {
        Mass::from_si(match self {
            Particle::Electron => ELECTRON_MASS,
            Particle::Protium => PROTON_MASS,
            Particle::Deuterium => DEUTERON_MASS,
            Particle::Tritium => TRITON_MASS,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Particle::Electron => "electron",
            Particle::Protium => "protium",
            Particle::Deuterium => "deuterium",
            Particle::Tritium => "tritium",
        }
    }
}

impl std::str::FromStr for Particle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "electron" | "e" => Ok(Particle::Electron),
            "protium" | "proton" | "h" | "H" => Ok(Particle::Protium),
            "deuterium" | "deuteron" | "d" | "D" => Ok(Particle::Deuterium),
            "tritium" | "triton" | "t" | "T" => Ok(Particle::Tritium),
            other => Err(Error::invalid("particle", format!("unknown particle `{other}`"))),
        }
    }
}

/// Width over which `m_target` tunnels with the same WKB exponent as `m_ref`
/// over `d_ref`, at equal barrier height above E: d_ref·√(m_ref/m_target).
pub fn equal_probability_distance(m_ref: Mass, d_ref: Length, m_target: Mass) -> Result<Length> {
    for (name, v) in [("m_ref", m_ref.si()), ("d_ref", d_ref.si()), ("m_target", m_target.si())] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, "must be finite and > 0"));
        }
    }
    if m_ref == m_target {
        return Ok(d_ref);
    }
    Ok(Length::from_si(d_ref.si() * (m_ref.si() / m_target.si()).sqrt()))
}

/// Example thermal trigger: V_C = 1e12 /s, E_A = 0.5 eV. Unvalidated.
pub const THERMAL_PRESET_V_C: f64 = 1e12;
pub const THERMAL_PRESET_E_A_EV: f64 = 0.5;

/// Example semiclassical trigger: a proton at E = 0 under a 0.3 eV, 0.1 nm
/// rectangular barrier, localised over 0.05 nm. Unvalidated.
pub fn wkb_preset() -> TunnelingProblem {
    TunnelingProblem::new(
        Particle::Protium.mass(),
        Energy::ev(0.0),
        BarrierPotential::rectangular(0.3 * ELEMENTARY_CHARGE, 0.1e-9).expect("valid preset barrier"),
        None,
        Some(Length::nm(0.05)),
    )
    .expect("valid preset problem")
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepModel {
    /// Arrhenius with prefactor (1/s) and activation energy; T is swept.
    Thermal { v_c: f64, e_a: Energy },
    Wkb(TunnelingProblem),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t_k: f64,
    pub k_per_s: f64,
}

/// Uniform temperature grid of `n_points` from `t_min` to `t_max` (K).
pub fn temperature_grid(t_min: f64, t_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max.is_finite() && t_max >= t_min) {
        return Err(Error::invalid("t_range", "need 0 < t_min <= t_max < inf"));
    }
    if n_points < 2 {
        return Err(Error::invalid("n_points", "need at least 2 points"));
    }
    let h = (t_max - t_min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| if i == n_points - 1 { t_max } else { t_min + i as f64 * h })
        .collect())
}

pub fn temperature_sweep(model: &SweepModel, t_min: f64, t_max: f64, n_points: usize) -> Result<Vec<SweepPoint>> {
    let temps = temperature_grid(t_min, t_max, n_points)?;
    temps
        .par_iter()
        .map(|&t_k| {
            let k = match model {
                SweepModel::Thermal { v_c, e_a } => {
                    arrhenius_rate(&ThermalModel::new(*v_c, *e_a, Temperature::from_si(t_k))?).si()
                }
                // The semiclassical rate has no temperature argument.
                SweepModel::Wkb(problem) => wkb_rate(problem)?.si(),
            };
            Ok(SweepPoint { t_k, k_per_s: k })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ELEMENTARY_CHARGE as EV;

    fn rect_problem(mass: f64, height_ev: f64, width: f64, e_ev: f64) -> TunnelingProblem {
        TunnelingProblem::new(
            Mass::from_si(mass),
            Energy::ev(e_ev),
            BarrierPotential::rectangular(height_ev * EV, width).unwrap(),
            Some(1e13),
            None,
        )
        .unwrap()
    }

    #[test]
    fn arrhenius_examples() {
        let m = ThermalModel::new(1e12, Energy::ev(0.0), Temperature::from_si(310.0)).unwrap();
        assert_eq!(arrhenius_rate(&m).si(), 1e12);

        // 1e12·exp(−0.5 eV/(k_B·310 K)) evaluated at 40 digits.
        let m = ThermalModel::new(1e12, Energy::ev(0.5), Temperature::from_si(310.0)).unwrap();
        let k = arrhenius_rate(&m).si();
        assert!((k - 7435.762460102376).abs() / 7435.762460102376 < 1e-12);
        assert!((k - 7.4e3).abs() / 7.4e3 < 0.01);

        let cold = ThermalModel::new(1e12, Energy::ev(0.5), Temperature::from_si(155.0)).unwrap();
        assert!(arrhenius_rate(&cold).si() < k);
    }

    #[test]
    fn thermal_model_validation() {
        assert!(ThermalModel::new(0.0, Energy::ev(0.1), Temperature::from_si(300.0)).is_err());
        assert!(ThermalModel::new(1.0, Energy::ev(-0.1), Temperature::from_si(300.0)).is_err());
        assert!(ThermalModel::new(1.0, Energy::ev(0.1), Temperature::from_si(0.0)).is_err());
    }

    #[test]
    fn rectangular_turning_points_are_edges() {
        let b = BarrierPotential::rectangular(0.5 * EV, 1e-9).unwrap();
        let tp = find_turning_points(&b, 0.1 * EV).unwrap();
        assert_eq!(tp.b - tp.a, 1e-9);
    }

    #[test]
    fn parabolic_turning_points_at_zero_energy() {
        let l = 0.3e-9;
        let b = BarrierPotential::parabolic(0.4 * EV, l).unwrap();
        let tp = find_turning_points(&b, 0.0).unwrap();
        assert!((tp.a + l).abs() < 1e-12 * l);
        assert!((tp.b - l).abs() < 1e-12 * l);
        assert!((b.eval(tp.a)).abs() < 1e-12 * b.max_value());
        assert!((b.eval(tp.b)).abs() < 1e-12 * b.max_value());
    }

    #[test]
    fn above_barrier_is_rejected() {
        let b = BarrierPotential::gaussian(0.3 * EV, 1e-10).unwrap();
        assert!(matches!(find_turning_points(&b, 0.3 * EV), Err(Error::NoBarrier { .. })));
        assert!(matches!(find_turning_points(&b, 0.5 * EV), Err(Error::NoBarrier { .. })));
    }

    #[test]
    fn double_hump_is_multi_barrier() {
        let q: Vec<f64> = (0..9).map(|i| i as f64 * 1e-10).collect();
        let v: Vec<f64> = [0.0, 0.4, 0.5, 0.4, 0.1, 0.4, 0.5, 0.4, 0.0].iter().map(|x| x * EV).collect();
        let b = BarrierPotential::tabulated(MonotoneCubic::new(q, v).unwrap()).unwrap();
        assert_eq!(find_turning_points(&b, 0.2 * EV), Err(Error::MultiBarrier { count: 2 }));
        assert!(find_turning_points(&b, 0.05 * EV).is_ok());
    }

    #[test]
    fn rectangular_action_matches_closed_form() {
        let p = rect_problem(PROTON_MASS, 0.4, 0.05e-9, 0.1);
        let theta = wkb_action(&p).unwrap();
        let exact = rectangular_action(PROTON_MASS, 0.4 * EV, 0.05e-9, 0.1 * EV);
        assert!((theta - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn parabolic_action_matches_closed_form() {
        // Θ = π√(2mV)·q_t²/(ħL) with q_t = L√(1 − E/V)
        let (v, l, e) = (0.3 * EV, 0.4e-10, 0.05 * EV);
        let p = TunnelingProblem::new(
            Mass::from_si(PROTON_MASS),
            Energy::from_si(e),
            BarrierPotential::parabolic(v, l).unwrap(),
            Some(1e13),
            None,
        )
        .unwrap();
        let qt2 = l * l * (1.0 - e / v);
        let exact = std::f64::consts::PI * (2.0 * PROTON_MASS * v).sqrt() * qt2 / (HBAR * l);
        let theta = wkb_action(&p).unwrap();
        assert!((theta - exact).abs() / exact < 1e-10);
    }

    #[test]
    fn action_vanishes_at_barrier_top_and_scales_with_root_mass() {
        let near_top = TunnelingProblem::new(
            Mass::from_si(PROTON_MASS),
            Energy::ev(0.3 * (1.0 - 1e-10)),
            BarrierPotential::parabolic(0.3 * EV, 0.4e-10).unwrap(),
            Some(1e13),
            None,
        )
        .unwrap();
        assert!(wkb_action(&near_top).unwrap() < 1e-8);

        let p = TunnelingProblem::new(
            Mass::from_si(PROTON_MASS),
            Energy::ev(0.0),
            BarrierPotential::parabolic(0.3 * EV, 0.3e-10).unwrap(),
            Some(1e13),
            None,
        )
        .unwrap();
        let t1 = wkb_action(&p).unwrap();
        let t2 = wkb_action(&p.with_mass(Mass::from_si(2.0 * PROTON_MASS)).unwrap()).unwrap();
        assert!((t2 / t1 - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rate_limits() {
        let p = rect_problem(PROTON_MASS, 0.4, 0.05e-9, 0.1);
        let k = wkb_rate(&p).unwrap().si();
        assert!(k > 0.0 && k <= p.omega_0());
        let theta = wkb_action(&p).unwrap();
        assert!((k - 1e13 * (-theta).exp()).abs() <= 1e-15 * k);
        // Θ = ln 2 ⇒ k = ω₀/2: pick the width that gives exactly ln 2.
        let dv = 0.3 * EV;
        let w = std::f64::consts::LN_2 * HBAR / (2.0 * (2.0 * ELECTRON_MASS * dv).sqrt());
        let half = rect_problem(ELECTRON_MASS, 0.3, w, 0.0);
        assert!((wkb_rate(&half).unwrap().si() / 1e13 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn protium_and_electron_at_equal_action_have_equal_rates() {
        let d_h = equal_probability_distance(Particle::Electron.mass(), Length::nm(2.5), Particle::Protium.mass()).unwrap();
        let e = rect_problem(ELECTRON_MASS, 0.5, 2.5e-9, 0.0);
        let h = rect_problem(PROTON_MASS, 0.5, d_h.si(), 0.0);
        let (ke, kh) = (wkb_rate(&e).unwrap().si(), wkb_rate(&h).unwrap().si());
        assert!((ke - kh).abs() / ke < 1e-9);
    }

    #[test]
    fn isotope_distances() {
        let me = Particle::Electron.mass();
        let d = |p: Particle| equal_probability_distance(me, Length::nm(2.5), p.mass()).unwrap().in_nm();
        // d_ref·√(m_e/m) at 40 digits: 0.058343, 0.041265, 0.033719 nm
        assert!((d(Particle::Protium) - 0.0583425777994010).abs() < 1e-15);
        assert!((d(Particle::Deuterium) - 0.0412646724472160).abs() < 1e-15);
        assert!((d(Particle::Tritium) - 0.0337194311771153).abs() < 1e-15);
        for (p, paper) in [(Particle::Protium, 0.058), (Particle::Deuterium, 0.041), (Particle::Tritium, 0.034)] {
            assert!((d(p) - paper).abs() / paper < 0.02);
        }
        let same = equal_probability_distance(me, Length::nm(2.5), me).unwrap();
        assert_eq!(same, Length::nm(2.5));
    }

    #[test]
    fn attempt_frequency_from_localisation() {
        let m = Mass::from_si(PROTON_MASS);
        let dq = Length::angstrom(0.5);
        let b = BarrierPotential::rectangular(0.3 * EV, 0.5e-10).unwrap();
        let p = TunnelingProblem::new(m, Energy::ev(0.0), b.clone(), None, Some(dq)).unwrap();
        let expected = HBAR / (2.0 * PROTON_MASS * 0.25e-20);
        assert!((p.omega_0() - expected).abs() / expected < 1e-14);
        assert!(TunnelingProblem::new(m, Energy::ev(0.0), b.clone(), Some(expected), Some(dq)).is_ok());
        assert!(matches!(
            TunnelingProblem::new(m, Energy::ev(0.0), b, Some(expected * 1.001), Some(dq)),
            Err(Error::InconsistentAttemptFrequency { .. })
        ));
    }

    #[test]
    fn sweeps() {
        let wkb = SweepModel::Wkb(rect_problem(PROTON_MASS, 0.4, 0.05e-9, 0.1));
        let s = temperature_sweep(&wkb, 250.0, 350.0, 11).unwrap();
        assert!(s.iter().all(|p| p.k_per_s.to_bits() == s[0].k_per_s.to_bits()));

        let flat = SweepModel::Thermal { v_c: 1e9, e_a: Energy::ev(0.0) };
        assert!(temperature_sweep(&flat, 250.0, 350.0, 5).unwrap().iter().all(|p| p.k_per_s == 1e9));

        assert!(temperature_sweep(&flat, 250.0, 350.0, 1).is_err());
        assert!(temperature_sweep(&flat, 0.0, 350.0, 3).is_err());
    }
}
