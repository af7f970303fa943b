//! `neuroquant` batch front-end.

mod args;
mod commands;
mod config;
mod error;
mod output;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, Subcommand};

use args::*;
use commands::execute;
use error::CliError;

#[derive(Parser)]
#[command(name = "neuroquant", version, about = "Collective water-dipole dynamics, tunnelling rates and release statistics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time evolution of N molecules coupled to cavity modes.
    #[command(allow_negative_numbers = true)]
    DickeEvolve(DickeEvolveArgs),
    /// Peak emission rate against N, collective and independent.
    #[command(allow_negative_numbers = true)]
    DickeScan(DickeScanArgs),
    /// Thermally activated rate at one temperature.
    #[command(allow_negative_numbers = true)]
    RateArrhenius(RateArrheniusArgs),
    /// Semiclassical tunnelling rate through a barrier.
    #[command(allow_negative_numbers = true)]
    RateWkb(RateWkbArgs),
    /// Equal-probability tunnelling distances across particle masses.
    #[command(allow_negative_numbers = true)]
    Isotope(IsotopeArgs),
    /// Rate against temperature for either rate model.
    #[command(allow_negative_numbers = true)]
    SweepTemp(SweepTempArgs),
    /// Tunnelling splittings per transverse level on a 2D surface.
    #[command(allow_negative_numbers = true)]
    MixedSplitting(MixedSplittingArgs),
    /// R/C/I classification of a 2D surface.
    #[command(allow_negative_numbers = true)]
    RegionMap(RegionMapArgs),
    /// Stochastic release trains from a trigger rate.
    #[command(allow_negative_numbers = true)]
    ExoSim(ExoSimArgs),
}

fn offending_flag(e: &clap::Error) -> String {
    match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => s
            .trim_start_matches('-')
            .split(|c: char| c.is_whitespace() || c == '=' || c == '<')
            .next()
            .unwrap_or_default()
            .to_string(),
        _ => match e.kind() {
            ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand => "subcommand".into(),
            _ => String::new(),
        },
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => {
                let message = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
                let err = CliError::Usage { flag: offending_flag(&e), message };
                eprintln!("{}", err.to_json());
                std::process::exit(err.exit_code());
            }
        },
    };
    let result = match cli.command {
        Cmd::DickeEvolve(a) => execute(a),
        Cmd::DickeScan(a) => execute(a),
        Cmd::RateArrhenius(a) => execute(a),
        Cmd::RateWkb(a) => execute(a),
        Cmd::Isotope(a) => execute(a),
        Cmd::SweepTemp(a) => execute(a),
        Cmd::MixedSplitting(a) => execute(a),
        Cmd::RegionMap(a) => execute(a),
        Cmd::ExoSim(a) => execute(a),
    };
    if let Err(e) = result {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
