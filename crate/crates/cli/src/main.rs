use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ratdyn_cli::{run, Family, Format, RunOptions};

#[derive(Parser)]
#[command(name = "ratdyn", version, about = "Run finite-scale experiments on symbolic sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence windows and generator tables
    Generate(Common),
    /// Besicovitch and Weyl distances
    Distance(Common),
    /// Periodic approximants and RAP profiles
    Approx(Common),
    /// Densities, cylinders and word statistics
    Density(Common),
    /// Sets of multiples and B-free numbers
    Bfree(Common),
    /// Automatic sequences and synchronizing words
    Automaton(Common),
    /// Weighted multiple recurrence in rotations
    Recurrence(Common),
    /// Finite polynomial Szemerédi search
    Psz(Common),
    /// Möbius averages and short intervals
    Mobius(Common),
    /// Fourier-Bohr coefficients and genericity
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Output file (default: the config's "out", else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for randomized descriptors; overrides the config
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (family, c) = match cli.command {
        Command::Generate(c) => (Family::Generate, c),
        Command::Distance(c) => (Family::Distance, c),
        Command::Approx(c) => (Family::Approx, c),
        Command::Density(c) => (Family::Density, c),
        Command::Bfree(c) => (Family::Bfree, c),
        Command::Automaton(c) => (Family::Automaton, c),
        Command::Recurrence(c) => (Family::Recurrence, c),
        Command::Psz(c) => (Family::Psz, c),
        Command::Mobius(c) => (Family::Mobius, c),
        Command::Spectrum(c) => (Family::Spectrum, c),
    };
    let opts = RunOptions {
        family,
        config: c.config,
        out: c.out,
        workers: c.workers,
        seed: c.seed,
        format: c.format,
    };
    match run(&opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ratdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
