//! Per-subcommand resolution (defaults and validation) and execution.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use neuroquant::constants::{BOLTZMANN, ELEMENTARY_CHARGE as EV, HBAR};
use neuroquant::dicke::{self, CavityMode, CavityModeSet, CollectiveBasis, PropagatorMethod, QuantumState};
use neuroquant::exocytosis::{self, TriggerModel, RNG_NAME};
use neuroquant::fit::linear_fit;
use neuroquant::mixed::{self, CouplingForm, Grid2D, PesSpec, Preset, Region};
use neuroquant::tunneling::{self, BarrierPotential, Particle, SweepModel, ThermalModel, TunnelingProblem};
use neuroquant::units::{AngularFrequency, Energy, Length, Mass, Rate, Temperature, Time};
use neuroquant::Error;

use crate::args::*;
use crate::config;
use crate::error::CliError;
use crate::output::{self, Cell, Header, Report};

const PS: f64 = 1e-12;
const ANGSTROM: f64 = 1e-10;

pub trait Command: Serialize + DeserializeOwned {
    const NAME: &'static str;
    type Params: Serialize;
    fn common(&self) -> &Common;
    fn resolve(&self) -> Result<Self::Params, CliError>;
    fn format(p: &Self::Params) -> Format;
    fn seed(_p: &Self::Params) -> Option<u64> {
        None
    }
    fn run(p: &Self::Params) -> Result<Report, CliError>;
}

pub fn execute<C: Command>(flags: C) -> Result<(), CliError> {
    let file = match &flags.common().config {
        Some(path) => Some(config::load(path, C::NAME)?),
        None => None,
    };
    let merged = config::merge(&flags, file)?;
    let params = merged.resolve()?;
    let (config, hash) = config::echo(C::NAME, &params);
    let report = C::run(&params)?;
    if let Some(col) = report.first_non_finite() {
        return Err(CliError::Simulation(Error::InvalidParameter {
            name: "output",
            reason: format!("non-finite value in `{col}`"),
        }));
    }
    let header = Header { subcommand: C::NAME, seed: C::seed(&params), config, hash };
    let format = C::format(&params);
    let text = output::render(&report, &header, format);
    output::write(&text, output::destination(flags.common().out.clone(), C::NAME, format))
}

fn finite(flag: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(flag, format!("{flag} must be finite, got {v}")))
    }
}

fn positive(flag: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(flag, format!("{flag} must be > 0, got {v}")))
    }
}

fn non_negative(flag: &str, what: &str, v: f64) -> Result<f64, CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(flag, format!("{flag} must satisfy {what} ≥ 0, got {v}")))
    }
}

fn at_least(flag: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::usage(flag, format!("{flag} must be at least {min}, got {v}")))
    }
}

fn mev(j: f64) -> f64 {
    j / EV * 1e3
}

// ---------------------------------------------------------------- dicke-evolve

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct DickeEvolveParams {
    n: usize,
    modes: usize,
    epsilon_mev: f64,
    g_mev: f64,
    detuning_mev: f64,
    resonant: bool,
    cutoff: usize,
    t_final_ps: f64,
    dt_ps: f64,
    initial: Initial,
    method: Method,
    coupling: Coupling,
    dimension_cap: usize,
    format: Format,
}

impl Command for DickeEvolveArgs {
    const NAME: &'static str = "dicke-evolve";
    type Params = DickeEvolveParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<DickeEvolveParams, CliError> {
        let n = at_least("n", self.n.unwrap_or(1), 1)?;
        let epsilon_mev = positive("epsilon-mev", self.epsilon_mev.unwrap_or(24.8))?;
        let detuning_mev = finite("detuning-mev", self.detuning_mev.unwrap_or(0.0))?;
        if self.resonant && detuning_mev != 0.0 {
            return Err(CliError::usage("detuning-mev", "resonant runs need zero detuning"));
        }
        if epsilon_mev + detuning_mev <= 0.0 {
            return Err(CliError::usage("detuning-mev", "mode energy epsilon + detuning must be > 0"));
        }
        Ok(DickeEvolveParams {
            n,
            modes: at_least("modes", self.modes.unwrap_or(1), 1)?,
            epsilon_mev,
            g_mev: non_negative("g-mev", "g", self.g_mev.unwrap_or(1.0))?,
            detuning_mev,
            resonant: detuning_mev == 0.0,
            cutoff: at_least("cutoff", self.cutoff.unwrap_or(CavityModeSet::default_cutoff(n)), 1)?,
            t_final_ps: non_negative("t-final-ps", "t_final", self.t_final_ps.unwrap_or(20.0))?,
            dt_ps: positive("dt-ps", self.dt_ps.unwrap_or(0.01))?,
            initial: self.initial.unwrap_or(Initial::Excited),
            method: self.method.unwrap_or(Method::Auto),
            coupling: self.coupling.unwrap_or(Coupling::RotatingWave),
            dimension_cap: at_least("dimension-cap", self.dimension_cap.unwrap_or(4096), 2)?,
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &DickeEvolveParams) -> Format {
        p.format
    }

    fn run(p: &DickeEvolveParams) -> Result<Report, CliError> {
        let eps = Energy::mev(p.epsilon_mev);
        let omega = AngularFrequency::from_si(Energy::mev(p.epsilon_mev + p.detuning_mev).si() / HBAR);
        let ens = dicke::TwoLevelEnsemble::new(p.n, eps, 0.0)?;
        let modes = (0..p.modes)
            .map(|_| CavityMode { omega, kappa: [0.0, 0.0, 1.0], coupling: Energy::mev(p.g_mev) })
            .collect();
        let modes = CavityModeSet::new(modes, p.cutoff)?;
        let dimension = (p.n + 1).saturating_mul((p.cutoff + 1).saturating_pow(p.modes as u32));
        if dimension > p.dimension_cap {
            return Err(Error::DimensionCapExceeded { dimension, cap: p.dimension_cap }.into());
        }
        let basis = CollectiveBasis::new(p.n, p.modes, p.cutoff)?;
        let form = match p.coupling {
            Coupling::RotatingWave => dicke::CouplingForm::RotatingWave,
            Coupling::Full => dicke::CouplingForm::Full,
        };
        let h = dicke::build_total_with(&ens, &modes, &basis, form)?;
        let psi = match p.initial {
            Initial::Excited => QuantumState::fully_excited(basis),
            Initial::Ground => QuantumState::ground(basis),
        };
        let method = match p.method {
            Method::Auto => PropagatorMethod::Auto,
            Method::Eigen => PropagatorMethod::Eigen,
            Method::Expm => PropagatorMethod::Expm,
        };
        let tr = dicke::evolve_with(&psi, &h, p.t_final_ps * PS, p.dt_ps * PS, method)?;
        let rows = tr
            .times
            .iter()
            .zip(&tr.states)
            .map(|(t, s)| {
                let o = dicke::measure(s);
                vec![
                    Cell::Num(t / PS),
                    Cell::Num(o.inversion),
                    Cell::Num(o.photons.iter().sum()),
                    Cell::Num(o.excitation),
                    Cell::Num(o.fully_excited_population),
                    Cell::Num(dicke::emission_rate(s, &h)),
                ]
            })
            .collect();
        Ok(Report::new(
            vec!["t_ps", "inversion", "photons", "excitation", "p_excited", "emission_rate_per_s"],
            rows,
        )
        .result("dimension", Cell::Int(h.dimension() as u64))
        .result("max-norm-drift", Cell::Num(tr.max_norm_drift)))
    }
}

// ------------------------------------------------------------------ dicke-scan

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct DickeScanParams {
    n_list: Vec<usize>,
    epsilon_mev: f64,
    g_mev: f64,
    horizon_ps: f64,
    dt_ps: f64,
    dimension_cap: usize,
    format: Format,
}

impl Command for DickeScanArgs {
    const NAME: &'static str = "dicke-scan";
    type Params = DickeScanParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<DickeScanParams, CliError> {
        let n_list = self.n_list.clone().unwrap_or_else(|| vec![1, 2, 4, 8]);
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(CliError::usage("n-list", "n-list needs one or more counts, each at least 1"));
        }
        let epsilon_mev = positive("epsilon-mev", self.epsilon_mev.unwrap_or(24.8))?;
        let g_mev = non_negative("g-mev", "g", self.g_mev.unwrap_or(0.5))?;
        let reference = dicke::ScanConfig::resonant(Energy::mev(epsilon_mev), Energy::mev(g_mev));
        let horizon_ps = positive("horizon-ps", self.horizon_ps.unwrap_or(reference.horizon / PS))?;
        Ok(DickeScanParams {
            n_list,
            epsilon_mev,
            g_mev,
            horizon_ps,
            dt_ps: positive("dt-ps", self.dt_ps.unwrap_or(horizon_ps / 4000.0))?,
            dimension_cap: at_least("dimension-cap", self.dimension_cap.unwrap_or(4096), 2)?,
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &DickeScanParams) -> Format {
        p.format
    }

    fn run(p: &DickeScanParams) -> Result<Report, CliError> {
        let eps = Energy::mev(p.epsilon_mev);
        let cfg = dicke::ScanConfig {
            epsilon: eps,
            omega: AngularFrequency::from_si(eps.si() / HBAR),
            g: Energy::mev(p.g_mev),
            horizon: p.horizon_ps * PS,
            dt: p.dt_ps * PS,
            dimension_cap: p.dimension_cap,
        };
        let coll = dicke::superradiance_scan(&p.n_list, &cfg)?;
        let ind = dicke::independent_scan(&p.n_list, &cfg)?;
        let rows = coll
            .iter()
            .zip(&ind)
            .map(|(c, i)| {
                vec![
                    Cell::Int(c.n as u64),
                    Cell::Int(c.dimension as u64),
                    Cell::Num(c.peak_emission_rate),
                    Cell::Num(i.peak_emission_rate),
                ]
            })
            .collect();
        let mut report =
            Report::new(vec!["n", "dimension", "peak_collective_per_s", "peak_independent_per_s"], rows);
        let mut distinct = p.n_list.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let usable = coll.iter().all(|r| r.peak_emission_rate > 0.0);
        if distinct.len() >= 2 && usable {
            report = report
                .result("collective-exponent", Cell::Num(dicke::power_law_exponent(&coll)))
                .result("independent-exponent", Cell::Num(dicke::power_law_exponent(&ind)));
        }
        Ok(report)
    }
}

// -------------------------------------------------------------- rate-arrhenius

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct RateArrheniusParams {
    vc: f64,
    ea_ev: f64,
    temp_k: f64,
    format: Format,
}

impl Command for RateArrheniusArgs {
    const NAME: &'static str = "rate-arrhenius";
    type Params = RateArrheniusParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<RateArrheniusParams, CliError> {
        Ok(RateArrheniusParams {
            vc: positive("vc", self.vc.unwrap_or(tunneling::THERMAL_PRESET_V_C))?,
            ea_ev: non_negative("ea-ev", "E_A", self.ea_ev.unwrap_or(tunneling::THERMAL_PRESET_E_A_EV))?,
            temp_k: positive("temp-k", self.temp_k.unwrap_or(310.0))?,
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &RateArrheniusParams) -> Format {
        p.format
    }

    fn run(p: &RateArrheniusParams) -> Result<Report, CliError> {
        let m = ThermalModel::new(p.vc, Energy::ev(p.ea_ev), Temperature::from_si(p.temp_k))?;
        let k = tunneling::arrhenius_rate(&m).si();
        Ok(Report::new(vec!["T_K", "k_per_s"], vec![vec![Cell::Num(p.temp_k), Cell::Num(k)]]))
    }
}

// ------------------------------------------------------------ WKB (shared)

/// Barrier/particle flags shared by rate-wkb and sweep-temp.
struct WkbInput<'a> {
    particle: Option<Particle>,
    mass_kg: Option<f64>,
    energy_ev: Option<f64>,
    barrier: Option<BarrierShape>,
    height_ev: Option<f64>,
    width_nm: Option<f64>,
    table: &'a Option<PathBuf>,
    omega0: Option<f64>,
    delta_q_nm: Option<f64>,
}

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct WkbParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    particle: Option<Particle>,
    mass_kg: f64,
    energy_ev: f64,
    barrier: BarrierShape,
    #[serde(skip_serializing_if = "Option::is_none")]
    height_ev: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_q_nm: Option<f64>,
}

fn resolve_wkb(w: WkbInput) -> Result<WkbParams, CliError> {
    let (particle, mass_kg) = match (w.particle, w.mass_kg) {
        (Some(p), Some(m)) if m != p.mass().si() => {
            return Err(CliError::usage("mass-kg", format!("mass-kg {m} contradicts particle {}", p.name())))
        }
        (p, Some(m)) => (p, positive("mass-kg", m)?),
        (p, None) => {
            let p = p.unwrap_or(Particle::Protium);
            (Some(p), p.mass().si())
        }
    };
    let barrier = w.barrier.unwrap_or(BarrierShape::Rectangular);
    let (height_ev, width_nm, table) = match barrier {
        BarrierShape::Tabulated => {
            let Some(t) = w.table.clone() else {
                return Err(CliError::usage("table", "tabulated barrier needs --table"));
            };
            (None, None, Some(t))
        }
        _ => (
            Some(positive("height-ev", w.height_ev.unwrap_or(0.3))?),
            Some(positive("width-nm", w.width_nm.unwrap_or(0.1))?),
            None,
        ),
    };
    let (omega0, delta_q_nm) = match (w.omega0, w.delta_q_nm) {
        (None, None) => (None, Some(0.05)),
        (o, d) => (o.map(|v| positive("omega0", v)).transpose()?, d.map(|v| positive("delta-q-nm", v)).transpose()?),
    };
    Ok(WkbParams {
        particle,
        mass_kg,
        energy_ev: non_negative("energy-ev", "E", w.energy_ev.unwrap_or(0.0))?,
        barrier,
        height_ev,
        width_nm,
        table,
        omega0,
        delta_q_nm,
    })
}

fn build_problem(p: &WkbParams) -> Result<TunnelingProblem, CliError> {
    let barrier = match p.barrier {
        BarrierShape::Tabulated => {
            let path = p.table.as_ref().expect("resolved");
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::usage("table", format!("cannot open {}: {e}", path.display())))?;
            tunneling::read_tabulated_csv(file)?
        }
        shape => {
            let h = p.height_ev.expect("resolved") * EV;
            let w = p.width_nm.expect("resolved") * 1e-9;
            match shape {
                BarrierShape::Rectangular => BarrierPotential::rectangular(h, w)?,
                BarrierShape::Parabolic => BarrierPotential::parabolic(h, w)?,
                _ => BarrierPotential::gaussian(h, w)?,
            }
        }
    };
    Ok(TunnelingProblem::new(
        Mass::from_si(p.mass_kg),
        Energy::ev(p.energy_ev),
        barrier,
        p.omega0,
        p.delta_q_nm.map(Length::nm),
    )?)
}

// -------------------------------------------------------------------- rate-wkb

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct RateWkbParams {
    #[serde(flatten)]
    wkb: WkbParams,
    format: Format,
}

impl Command for RateWkbArgs {
    const NAME: &'static str = "rate-wkb";
    type Params = RateWkbParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<RateWkbParams, CliError> {
        let wkb = resolve_wkb(WkbInput {
            particle: self.particle,
            mass_kg: self.mass_kg,
            energy_ev: self.energy_ev,
            barrier: self.barrier,
            height_ev: self.height_ev,
            width_nm: self.width_nm,
            table: &self.table,
            omega0: self.omega0,
            delta_q_nm: self.delta_q_nm,
        })?;
        Ok(RateWkbParams { wkb, format: self.format.unwrap_or(Format::Csv) })
    }

    fn format(p: &RateWkbParams) -> Format {
        p.format
    }

    fn run(p: &RateWkbParams) -> Result<Report, CliError> {
        let problem = build_problem(&p.wkb)?;
        let tp = tunneling::find_turning_points(problem.barrier(), problem.energy().si())?;
        let theta = tunneling::wkb_action(&problem)?;
        let k = tunneling::wkb_rate(&problem)?.si();
        Ok(Report::new(
            vec!["theta", "omega0_per_s", "k_per_s", "a_nm", "b_nm"],
            vec![vec![
                Cell::Num(theta),
                Cell::Num(problem.omega_0()),
                Cell::Num(k),
                Cell::Num(tp.a * 1e9),
                Cell::Num(tp.b * 1e9),
            ]],
        ))
    }
}

// --------------------------------------------------------------------- isotope

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct IsotopeParams {
    #[serde(rename = "ref")]
    reference: Particle,
    ref_d_nm: f64,
    target: Target,
    format: Format,
}

impl Command for IsotopeArgs {
    const NAME: &'static str = "isotope";
    type Params = IsotopeParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<IsotopeParams, CliError> {
        Ok(IsotopeParams {
            reference: self.reference.unwrap_or(Particle::Electron),
            ref_d_nm: positive("ref-d-nm", self.ref_d_nm.unwrap_or(2.5))?,
            target: self.target.unwrap_or(Target::All),
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &IsotopeParams) -> Format {
        p.format
    }

    fn run(p: &IsotopeParams) -> Result<Report, CliError> {
        let targets = match p.target {
            Target::All => vec![Particle::Electron, Particle::Protium, Particle::Deuterium, Particle::Tritium],
            Target::Electron => vec![Particle::Electron],
            Target::Protium => vec![Particle::Protium],
            Target::Deuterium => vec![Particle::Deuterium],
            Target::Tritium => vec![Particle::Tritium],
        };
        let d_ref = Length::nm(p.ref_d_nm);
        let rows = targets
            .into_iter()
            .map(|t| {
                let d = tunneling::equal_probability_distance(p.reference.mass(), d_ref, t.mass())?;
                Ok(vec![Cell::Text(t.name().into()), Cell::Num(t.mass().si()), Cell::Num(d.in_nm())])
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Report::new(vec!["particle", "mass_kg", "d_nm"], rows))
    }
}

// ------------------------------------------------------------------ sweep-temp

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct ThermalParams {
    vc: f64,
    ea_ev: f64,
}

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct SweepTempParams {
    model: RateModel,
    t_min_k: f64,
    t_max_k: f64,
    n_points: usize,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    thermal: Option<ThermalParams>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    wkb: Option<WkbParams>,
    format: Format,
}

impl Command for SweepTempArgs {
    const NAME: &'static str = "sweep-temp";
    type Params = SweepTempParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<SweepTempParams, CliError> {
        let model = self.model.unwrap_or(RateModel::Thermal);
        let t_min_k = positive("t-min-k", self.t_min_k.unwrap_or(250.0))?;
        let t_max_k = positive("t-max-k", self.t_max_k.unwrap_or(350.0))?;
        if t_max_k < t_min_k {
            return Err(CliError::usage("t-max-k", "t-max-k must be >= t-min-k"));
        }
        let (thermal, wkb) = match model {
            RateModel::Thermal => (
                Some(ThermalParams {
                    vc: positive("vc", self.vc.unwrap_or(tunneling::THERMAL_PRESET_V_C))?,
                    ea_ev: non_negative("ea-ev", "E_A", self.ea_ev.unwrap_or(tunneling::THERMAL_PRESET_E_A_EV))?,
                }),
                None,
            ),
            RateModel::Wkb => (
                None,
                Some(resolve_wkb(WkbInput {
                    particle: self.particle,
                    mass_kg: self.mass_kg,
                    energy_ev: self.energy_ev,
                    barrier: self.barrier,
                    height_ev: self.height_ev,
                    width_nm: self.width_nm,
                    table: &self.table,
                    omega0: self.omega0,
                    delta_q_nm: self.delta_q_nm,
                })?),
            ),
        };
        Ok(SweepTempParams {
            model,
            t_min_k,
            t_max_k,
            n_points: at_least("n-points", self.n_points.unwrap_or(101), 2)?,
            thermal,
            wkb,
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &SweepTempParams) -> Format {
        p.format
    }

    fn run(p: &SweepTempParams) -> Result<Report, CliError> {
        let model = match (&p.thermal, &p.wkb) {
            (Some(t), _) => SweepModel::Thermal { v_c: t.vc, e_a: Energy::ev(t.ea_ev) },
            (_, Some(w)) => SweepModel::Wkb(build_problem(w)?),
            _ => unreachable!("resolved model"),
        };
        let pts = tunneling::temperature_sweep(&model, p.t_min_k, p.t_max_k, p.n_points)?;
        let rows = pts.iter().map(|pt| vec![Cell::Num(pt.t_k), Cell::Num(pt.k_per_s)]).collect();
        let mut report = Report::new(vec!["T_K", "k_per_s"], rows);
        if p.thermal.is_some() && p.t_max_k > p.t_min_k && pts.iter().all(|pt| pt.k_per_s > 0.0) {
            let x: Vec<f64> = pts.iter().map(|pt| 1.0 / pt.t_k).collect();
            let y: Vec<f64> = pts.iter().map(|pt| pt.k_per_s.ln()).collect();
            let slope = linear_fit(&x, &y).slope;
            report = report.result("fitted-ea-ev", Cell::Num(-slope * BOLTZMANN / EV));
        }
        Ok(report)
    }
}

// ------------------------------------------------------ mixed surface (shared)

struct PesInput {
    preset: Option<Preset>,
    v_b_ev: Option<f64>,
    xi0_angstrom: Option<f64>,
    hw_eta_ev: Option<f64>,
    coupling_form: Option<CouplingForm>,
    c: Option<f64>,
    mass_xi_kg: Option<f64>,
    mass_eta_kg: Option<f64>,
    n_xi: Option<usize>,
    n_eta: Option<usize>,
}

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct PesParams {
    preset: Preset,
    v_b_ev: f64,
    xi0_angstrom: f64,
    hw_eta_ev: f64,
    coupling_form: CouplingForm,
    c: f64,
    mass_xi_kg: f64,
    mass_eta_kg: f64,
    n_xi: usize,
    n_eta: usize,
}

impl PesParams {
    fn spec(&self) -> PesSpec {
        PesSpec {
            v_b_ev: self.v_b_ev,
            xi0_angstrom: self.xi0_angstrom,
            hw_eta_ev: self.hw_eta_ev,
            coupling_form: self.coupling_form,
            c: self.c,
            mass_xi_kg: self.mass_xi_kg,
            mass_eta_kg: self.mass_eta_kg,
        }
    }

    fn surface(&self) -> Result<(mixed::Pes2D, Grid2D), CliError> {
        let pes = mixed::build_pes(&self.spec())?;
        let grid = Grid2D::for_pes(&pes, self.n_xi, self.n_eta)?;
        Ok((pes, grid))
    }
}

fn resolve_pes(i: PesInput) -> Result<PesParams, CliError> {
    let preset = i.preset.unwrap_or(Preset::Neutral);
    let base = preset.spec();
    Ok(PesParams {
        preset,
        v_b_ev: positive("v-b-ev", i.v_b_ev.unwrap_or(base.v_b_ev))?,
        xi0_angstrom: positive("xi0-angstrom", i.xi0_angstrom.unwrap_or(base.xi0_angstrom))?,
        hw_eta_ev: positive("hw-eta-ev", i.hw_eta_ev.unwrap_or(base.hw_eta_ev))?,
        coupling_form: i.coupling_form.unwrap_or(base.coupling_form),
        c: finite("c", i.c.unwrap_or(base.c))?,
        mass_xi_kg: positive("mass-xi-kg", i.mass_xi_kg.unwrap_or(base.mass_xi_kg))?,
        mass_eta_kg: positive("mass-eta-kg", i.mass_eta_kg.unwrap_or(base.mass_eta_kg))?,
        n_xi: at_least("n-xi", i.n_xi.unwrap_or(128), mixed::grid::MIN_POINTS)?,
        n_eta: at_least("n-eta", i.n_eta.unwrap_or(64), mixed::grid::MIN_POINTS)?,
    })
}

// ------------------------------------------------------------- mixed-splitting

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct MixedSplittingParams {
    #[serde(flatten)]
    pes: PesParams,
    n_max: usize,
    tol: f64,
    convergence: bool,
    format: Format,
}

impl Command for MixedSplittingArgs {
    const NAME: &'static str = "mixed-splitting";
    type Params = MixedSplittingParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<MixedSplittingParams, CliError> {
        let pes = resolve_pes(PesInput {
            preset: self.preset,
            v_b_ev: self.v_b_ev,
            xi0_angstrom: self.xi0_angstrom,
            hw_eta_ev: self.hw_eta_ev,
            coupling_form: self.coupling_form,
            c: self.c,
            mass_xi_kg: self.mass_xi_kg,
            mass_eta_kg: self.mass_eta_kg,
            n_xi: self.n_xi,
            n_eta: self.n_eta,
        })?;
        Ok(MixedSplittingParams {
            pes,
            n_max: self.n_max.unwrap_or(3),
            tol: positive("tol", self.tol.unwrap_or(mixed::DEFAULT_EFFECT_TOL))?,
            convergence: self.convergence.unwrap_or(true),
            format: self.format.unwrap_or(Format::Json),
        })
    }

    fn format(p: &MixedSplittingParams) -> Format {
        p.format
    }

    fn run(p: &MixedSplittingParams) -> Result<Report, CliError> {
        let (pes, grid) = p.pes.surface()?;
        let spectrum = mixed::splitting_spectrum(&pes, &grid, p.n_max)?;
        let effect = mixed::classify_mode_effect(&spectrum.splittings(), p.tol);
        let conv = if p.convergence { Some(mixed::grid_convergence(&pes, &grid, p.n_max)?) } else { None };
        let ratios = spectrum.ratios();
        let mut columns = vec!["n", "splitting_mev", "ratio", "symmetric_mev", "antisymmetric_mev"];
        if conv.is_some() {
            columns.push("richardson_mev");
        }
        let rows = spectrum
            .doublets
            .iter()
            .zip(&ratios)
            .map(|(d, r)| {
                let mut row = vec![
                    Cell::Int(d.n as u64),
                    Cell::Num(mev(d.splitting)),
                    Cell::Num(*r),
                    Cell::Num(mev(d.symmetric_energy)),
                    Cell::Num(mev(d.antisymmetric_energy)),
                ];
                if let Some(c) = &conv {
                    row.push(Cell::Num(mev(c.richardson[d.n])));
                }
                row
            })
            .collect();
        let effect_name = serde_json::to_value(effect).expect("enum").as_str().unwrap_or_default().to_string();
        let mut report = Report::new(columns, rows).result("mode-effect", Cell::Text(effect_name.clone()));
        if let Some(c) = &conv {
            report = report.result("max-richardson-mev", Cell::Num(mev(c.max_error())));
        }
        let doublets: Vec<_> = spectrum
            .doublets
            .iter()
            .zip(&ratios)
            .map(|(d, r)| {
                json!({
                    "n": d.n,
                    "splitting-mev": mev(d.splitting),
                    "ratio": r,
                    "symmetric-mev": mev(d.symmetric_energy),
                    "antisymmetric-mev": mev(d.antisymmetric_energy),
                })
            })
            .collect();
        let convergence = conv.as_ref().map(|c| {
            json!({
                "coarse-splitting-mev": c.coarse.iter().map(|v| mev(*v)).collect::<Vec<_>>(),
                "richardson-mev": c.richardson.iter().map(|v| mev(*v)).collect::<Vec<_>>(),
                "relative-change": c.relative_change,
            })
        });
        report.data = Some(json!({
            "mode-effect": effect_name,
            "doublets": doublets,
            "convergence": convergence,
            "grid": { "n-xi": grid.n_xi, "n-eta": grid.n_eta,
                      "xi-max-angstrom": grid.xi_range.1 / ANGSTROM, "eta-max-angstrom": grid.eta_range.1 / ANGSTROM },
        }));
        Ok(report)
    }
}

// ------------------------------------------------------------------ region-map

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct RegionMapParams {
    #[serde(flatten)]
    pes: PesParams,
    e_total_ev: f64,
    e_eta_ev: f64,
    format: Format,
}

impl Command for RegionMapArgs {
    const NAME: &'static str = "region-map";
    type Params = RegionMapParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<RegionMapParams, CliError> {
        let pes = resolve_pes(PesInput {
            preset: self.preset,
            v_b_ev: self.v_b_ev,
            xi0_angstrom: self.xi0_angstrom,
            hw_eta_ev: self.hw_eta_ev,
            coupling_form: self.coupling_form,
            c: self.c,
            mass_xi_kg: self.mass_xi_kg,
            mass_eta_kg: self.mass_eta_kg,
            n_xi: self.n_xi,
            n_eta: self.n_eta,
        })?;
        Ok(RegionMapParams {
            pes,
            e_total_ev: positive("e-total-ev", self.e_total_ev.unwrap_or(0.25))?,
            e_eta_ev: finite("e-eta-ev", self.e_eta_ev.unwrap_or(0.25))?,
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &RegionMapParams) -> Format {
        p.format
    }

    fn run(p: &RegionMapParams) -> Result<Report, CliError> {
        let (pes, grid) = p.pes.surface()?;
        let map = mixed::classify_regions(&pes, p.e_total_ev * EV, p.e_eta_ev * EV, &grid)?;
        let mut rows = Vec::with_capacity(grid.len());
        for i in 0..grid.n_xi {
            for j in 0..grid.n_eta {
                rows.push(vec![
                    Cell::Num(grid.xi(i) / ANGSTROM),
                    Cell::Num(grid.eta(j) / ANGSTROM),
                    Cell::Text(map.label(i, j).as_char().to_string()),
                ]);
            }
        }
        let counts = [Region::R, Region::C, Region::I].map(|r| map.count(r) as u64);
        let mut report = Report::new(vec!["xi_angstrom", "eta_angstrom", "label"], rows)
            .result("count-r", Cell::Int(counts[0]))
            .result("count-c", Cell::Int(counts[1]))
            .result("count-i", Cell::Int(counts[2]));
        let label_rows: Vec<String> =
            (0..grid.n_xi).map(|i| (0..grid.n_eta).map(|j| map.label(i, j).as_char()).collect()).collect();
        report.data = Some(json!({
            "xi-angstrom": (0..grid.n_xi).map(|i| grid.xi(i) / ANGSTROM).collect::<Vec<_>>(),
            "eta-angstrom": (0..grid.n_eta).map(|j| grid.eta(j) / ANGSTROM).collect::<Vec<_>>(),
            "labels": label_rows,
            "counts": { "R": counts[0], "C": counts[1], "I": counts[2] },
        }));
        Ok(report)
    }
}

// --------------------------------------------------------------------- exo-sim

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "kebab-case")]
pub struct ExoSimParams {
    k_per_s: f64,
    tau_ms: f64,
    n: usize,
    seed: u64,
    trains: usize,
    format: Format,
}

impl Command for ExoSimArgs {
    const NAME: &'static str = "exo-sim";
    type Params = ExoSimParams;

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&self) -> Result<ExoSimParams, CliError> {
        let k_per_s = match self.k_per_s {
            Some(k) => positive("k-per-s", k)?,
            None => tunneling::wkb_rate(&tunneling::wkb_preset())?.si(),
        };
        let tau_ms = positive("tau-ms", self.tau_ms.unwrap_or(exocytosis::DEFAULT_GATE_WINDOW_S * 1e3))?;
        TriggerModel::new(Rate::from_si(k_per_s), Time::from_si(tau_ms * 1e-3))
            .map_err(|e| CliError::usage("k-per-s", e.to_string()))?;
        Ok(ExoSimParams {
            k_per_s,
            tau_ms,
            n: at_least("n", self.n.unwrap_or(10_000), 1)?,
            seed: self.seed.unwrap_or(0),
            trains: at_least("trains", self.trains.unwrap_or(1), 1)?,
            format: self.format.unwrap_or(Format::Csv),
        })
    }

    fn format(p: &ExoSimParams) -> Format {
        p.format
    }

    fn seed(p: &ExoSimParams) -> Option<u64> {
        Some(p.seed)
    }

    fn run(p: &ExoSimParams) -> Result<Report, CliError> {
        let model = TriggerModel::new(Rate::from_si(p.k_per_s), Time::from_si(p.tau_ms * 1e-3))?;
        let prob = exocytosis::release_probability(&model);
        let trains = exocytosis::simulate_trains(prob, p.n, p.seed, p.trains)?;
        let single = p.trains == 1;
        let mut rows = Vec::with_capacity(p.n * p.trains);
        let mut summaries = Vec::with_capacity(p.trains);
        for t in &trains {
            for (i, &b) in t.outcomes.iter().enumerate() {
                let mut row = vec![Cell::Int(i as u64), Cell::Int(b as u64)];
                if !single {
                    row.insert(0, Cell::Int(t.stream));
                }
                rows.push(row);
            }
            let s = exocytosis::empirical_stats(&t.outcomes)?;
            summaries.push(json!({ "seed": t.seed, "stream": t.stream, "stats": s }));
        }
        let columns = if single { vec!["impulse_index", "released"] } else { vec!["train", "impulse_index", "released"] };
        let mut report = Report::new(columns, rows).result("p", Cell::Num(prob));
        if single {
            let s = exocytosis::empirical_stats(&trains[0].outcomes)?;
            report = report
                .result("frequency", Cell::Num(s.frequency))
                .result("wilson-95-low", Cell::Num(s.ci_low))
                .result("wilson-95-high", Cell::Num(s.ci_high));
        }
        report.rng = Some(RNG_NAME);
        report.data = Some(json!({ "p": prob, "k-tau": model.k_tau(), "trains": summaries }));
        Ok(report)
    }
}
