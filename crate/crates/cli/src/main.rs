//! `majortom`: command-line access to the sampling grid, metadata catalogs
//! and scene-selection campaigns.

mod catalog;
mod cell;
mod grid;
mod io;
mod sample;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use majortom::GridSpec;

#[derive(Parser)]
#[command(
    name = "majortom",
    about = "Equidistant global grid, metadata catalogs and scene sampling",
    disable_version_flag = true
)]
struct Cli {
    /// Grid spacing D in km.
    #[arg(long, global = true, default_value_t = majortom::geogrid::DEFAULT_SPACING_KM)]
    spacing_km: f64,

    /// Sphere radius R in km.
    #[arg(long, global = true, default_value_t = majortom::geogrid::DEFAULT_EARTH_RADIUS_KM)]
    earth_radius_km: f64,

    /// Suppress progress and summary messages on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between cell ids and coordinates.
    #[command(subcommand)]
    Cell(cell::CellCommand),
    /// Grid properties and spatial queries.
    #[command(subcommand)]
    Grid(grid::GridCommand),
    /// Ingest, query and export metadata catalogs.
    #[command(subcommand)]
    Catalog(catalog::CatalogCommand),
    /// Cloud-aware scene selection campaigns.
    #[command(subcommand)]
    Sample(sample::SampleCommand),
    /// Print the program version.
    Version,
}

pub struct Ctx {
    pub spec: GridSpec,
    pub quiet: bool,
}

impl Ctx {
    pub fn note(&self, msg: impl std::fmt::Display) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = Ctx {
        spec: GridSpec::new(cli.spacing_km, cli.earth_radius_km)?,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Cell(cmd) => cell::run(&ctx, cmd),
        Command::Grid(cmd) => grid::run(&ctx, cmd),
        Command::Catalog(cmd) => catalog::run(&ctx, cmd),
        Command::Sample(cmd) => sample::run(&ctx, cmd),
        Command::Version => {
            println!("majortom {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if io::is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
