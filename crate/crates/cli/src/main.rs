//! `symquot` experiment runner. Every subcommand prints its main result to
//! stdout and, with `--out DIR`, also writes CSV/JSON artifacts plus a
//! `manifest.json` holding the resolved configuration and checksums.
//!
//! Exit codes: 0 success, 1 configuration error, 2 input-data error,
//! 3 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "symquot", version, about = "Symmetry statistics of random invariant landscapes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Base seed; falls back to the config file, then $SYMQUOT_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for artifacts and the manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON configuration; explicit flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Counts and starts scaled down five-fold.
    Desk,
}

#[derive(Subcommand)]
enum Command {
    /// Distinct-value profile over an ensemble of surveyed landscapes.
    Profile(commands::ProfileArgs),
    /// Exact real-image fractions and related counts.
    #[command(subcommand)]
    Rarity(commands::RarityCommand),
    /// Monte-Carlo real-rootedness probabilities by degree.
    Realroots(commands::RealRootsArgs),
    /// Lennard-Jones configuration analysis.
    #[command(subcommand)]
    Lj(commands::LjCommand),
    /// Single-start symmetric/asymmetric calibration runs.
    Calibrate(commands::CalibrateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Config = 1,
    Input = 2,
    Numeric = 3,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub err: anyhow::Error,
}

impl Failure {
    pub fn config(err: anyhow::Error) -> Self {
        Self {
            kind: Kind::Config,
            err,
        }
    }

    pub fn input(err: anyhow::Error) -> Self {
        Self {
            kind: Kind::Input,
            err,
        }
    }
}

impl From<symquot::Error> for Failure {
    fn from(e: symquot::Error) -> Self {
        use symquot::Error as E;
        let kind = match &e {
            E::Parse { .. } | E::NoBlocks | E::Io(_) => Kind::Input,
            E::Overflow { .. }
            | E::IllConditioned(_)
            | E::NonFinite
            | E::SingularPair(..)
            | E::Eigen
            | E::EnumerationBudget { .. } => Kind::Numeric,
            _ => Kind::Config,
        };
        Self {
            kind,
            err: e.into(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            return Err(Failure::config(anyhow::anyhow!("--jobs must be positive")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::config(e.into()))?;
    }
    let g = &cli.global;
    match cli.command {
        Command::Profile(a) => commands::profile(g, a),
        Command::Rarity(c) => commands::rarity(g, c),
        Command::Realroots(a) => commands::realroots(g, a),
        Command::Lj(c) => commands::lj(g, c),
        Command::Calibrate(a) => commands::calibrate(g, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Kind::Config as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.kind as u8)
        }
    }
}
