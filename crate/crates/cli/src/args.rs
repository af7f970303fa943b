//! Flag definitions. Every field is optional so a config file can supply it;
//! the same structs deserialize config files strictly.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use neuroquant::mixed::{CouplingForm, Preset};
use neuroquant::tunneling::Particle;
use serde::{Deserialize, Serialize};

/// Flags that select files rather than parameters; never echoed.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Config file: TOML, JSON, or a previous output of this tool.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file. Defaults to $NEUROQUANT_OUT_DIR/<subcommand>.<format>,
    /// or stdout when that variable is unset.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    Excited,
    Ground,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Auto,
    Eigen,
    Expm,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    RotatingWave,
    Full,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierShape {
    Rectangular,
    Parabolic,
    Gaussian,
    Tabulated,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    Thermal,
    Wkb,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    All,
    Electron,
    Protium,
    Deuterium,
    Tritium,
}

pub fn parse_particle(s: &str) -> Result<Particle, String> {
    s.parse().map_err(|e: neuroquant::Error| e.to_string())
}

pub fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: neuroquant::Error| e.to_string())
}

pub fn parse_coupling_form(s: &str) -> Result<CouplingForm, String> {
    match s {
        "xi-sq-eta" => Ok(CouplingForm::XiSqEta),
        "xi-eta" => Ok(CouplingForm::XiEta),
        other => Err(format!("unknown coupling form `{other}` (expected xi-sq-eta or xi-eta)")),
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DickeEvolveArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Number of molecules N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of cavity modes, all with the same frequency and coupling.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Level spacing ε (meV).
    #[arg(long)]
    pub epsilon_mev: Option<f64>,
    /// Coupling g per mode (meV).
    #[arg(long)]
    pub g_mev: Option<f64>,
    /// Mode energy minus ε (meV).
    #[arg(long)]
    pub detuning_mev: Option<f64>,
    /// Force zero detuning.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub resonant: bool,
    /// Photon cutoff per mode (default N + 2).
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub t_final_ps: Option<f64>,
    #[arg(long)]
    pub dt_ps: Option<f64>,
    #[arg(long)]
    pub initial: Option<Initial>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub coupling: Option<Coupling>,
    #[arg(long)]
    pub dimension_cap: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DickeScanArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Comma-separated molecule counts.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub epsilon_mev: Option<f64>,
    #[arg(long)]
    pub g_mev: Option<f64>,
    /// Default 10ħ/g.
    #[arg(long)]
    pub horizon_ps: Option<f64>,
    /// Default horizon/4000.
    #[arg(long)]
    pub dt_ps: Option<f64>,
    #[arg(long)]
    pub dimension_cap: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RateArrheniusArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Prefactor V_C (1/s).
    #[arg(long)]
    pub vc: Option<f64>,
    /// Activation energy E_A (eV).
    #[arg(long)]
    pub ea_ev: Option<f64>,
    #[arg(long)]
    pub temp_k: Option<f64>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RateWkbArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_parser = parse_particle)]
    pub particle: Option<Particle>,
    /// Explicit mass (kg); must match `particle` if both are given.
    #[arg(long)]
    pub mass_kg: Option<f64>,
    #[arg(long)]
    pub energy_ev: Option<f64>,
    #[arg(long)]
    pub barrier: Option<BarrierShape>,
    #[arg(long)]
    pub height_ev: Option<f64>,
    /// Full width (rectangular), half-width (parabolic) or σ (gaussian), nm.
    #[arg(long)]
    pub width_nm: Option<f64>,
    /// CSV with columns q_m,V_eV or q_angstrom,V_eV.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Attempt frequency ω₀ (rad/s).
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Localisation length Δq (nm); sets ω₀ = ħ/(2mΔq²).
    #[arg(long)]
    pub delta_q_nm: Option<f64>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct IsotopeArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Reference particle.
    #[arg(long = "ref", value_parser = parse_particle)]
    #[serde(rename = "ref")]
    pub reference: Option<Particle>,
    #[arg(long)]
    pub ref_d_nm: Option<f64>,
    #[arg(long)]
    pub target: Option<Target>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepTempArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long)]
    pub model: Option<RateModel>,
    #[arg(long)]
    pub t_min_k: Option<f64>,
    #[arg(long)]
    pub t_max_k: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub vc: Option<f64>,
    #[arg(long)]
    pub ea_ev: Option<f64>,
    #[arg(long, value_parser = parse_particle)]
    pub particle: Option<Particle>,
    #[arg(long)]
    pub mass_kg: Option<f64>,
    #[arg(long)]
    pub energy_ev: Option<f64>,
    #[arg(long)]
    pub barrier: Option<BarrierShape>,
    #[arg(long)]
    pub height_ev: Option<f64>,
    #[arg(long)]
    pub width_nm: Option<f64>,
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub delta_q_nm: Option<f64>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MixedSplittingArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// neutral, promoting or suppressing; other flags override its fields.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub v_b_ev: Option<f64>,
    #[arg(long)]
    pub xi0_angstrom: Option<f64>,
    #[arg(long)]
    pub hw_eta_ev: Option<f64>,
    #[arg(long, value_parser = parse_coupling_form)]
    pub coupling_form: Option<CouplingForm>,
    /// eV/Å³ for xi-sq-eta, eV/Å² for xi-eta.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub mass_xi_kg: Option<f64>,
    #[arg(long)]
    pub mass_eta_kg: Option<f64>,
    #[arg(long)]
    pub n_xi: Option<usize>,
    #[arg(long)]
    pub n_eta: Option<usize>,
    /// Highest transverse quantum number.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Tolerance on ΔE_n/ΔE_0 for the mode-effect class.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also solve on a half-resolution grid for an error estimate.
    #[arg(long)]
    pub convergence: Option<bool>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RegionMapArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub v_b_ev: Option<f64>,
    #[arg(long)]
    pub xi0_angstrom: Option<f64>,
    #[arg(long)]
    pub hw_eta_ev: Option<f64>,
    #[arg(long, value_parser = parse_coupling_form)]
    pub coupling_form: Option<CouplingForm>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub mass_xi_kg: Option<f64>,
    #[arg(long)]
    pub mass_eta_kg: Option<f64>,
    #[arg(long)]
    pub n_xi: Option<usize>,
    #[arg(long)]
    pub n_eta: Option<usize>,
    /// Total energy E (eV).
    #[arg(long)]
    pub e_total_ev: Option<f64>,
    /// Energy in the transverse channel (eV).
    #[arg(long)]
    pub e_eta_ev: Option<f64>,
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExoSimArgs {
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
    /// Trigger rate k (1/s). Default: the WKB example preset.
    #[arg(long)]
    pub k_per_s: Option<f64>,
    /// Gate window τ (ms).
    #[arg(long)]
    pub tau_ms: Option<f64>,
    /// Impulses per train.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent trains, one generator stream each.
    #[arg(long)]
    pub trains: Option<usize>,
    #[arg(long)]
    pub format: Option<Format>,
}
