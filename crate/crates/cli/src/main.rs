//! `gifs`: common attractors, collage certificates and well-posedness checks
//! for generalized iterated function systems.

mod commands;
mod document;
mod output;
mod sample;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Errors surfaced to the shell: `Input` exits 2, `Failure` exits 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl From<gifs_core::Error> for CliError {
    fn from(e: gifs_core::Error) -> Self {
        match e {
            gifs_core::Error::NonConvergence { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Cloud,
    Raster,
    Trace,
}

#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    /// Convergence tolerance (default: twice the snap spacing).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Lattice spacing for snapping iterates.
    #[arg(long, global = true)]
    pub snap: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Seed for every random sample drawn by the command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Compute Hausdorff distances by exhaustive search.
    #[arg(long, global = true)]
    pub exhaustive: bool,
}

#[derive(Debug, Parser)]
#[command(name = "gifs", version, about)]
struct Cli {
    #[command(flatten)]
    flags: RunFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the dislocated-metric axioms of a document's metric.
    CheckMetric { doc: PathBuf },
    /// Iterate to the common attractor; writes the cloud and `<out>.trace.csv`.
    Attractor {
        doc: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Cloud)]
        format: Format,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
    },
    /// Hausdorff dislocated distance between two clouds.
    Distance { doc: PathBuf, a: PathBuf, b: PathBuf },
    /// Collage certificate for a target cloud or PGM raster.
    Collage {
        doc: PathBuf,
        target: PathBuf,
        /// Search the document's [fit] family instead of using its maps.
        #[arg(long)]
        fit: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Residual-versus-distance table for perturbed attractors.
    Wellposed {
        doc: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a 1-D or 2-D cloud as a binary PGM.
    Render {
        cloud: PathBuf,
        raster: PathBuf,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GIFS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("GIFS_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let f = &cli.flags;
    match cli.command {
        Command::CheckMetric { doc } => commands::check_metric(&doc, f),
        Command::Attractor {
            doc,
            output,
            format,
            width,
            height,
        } => commands::attractor(&doc, output.as_deref(), format, (width, height), f),
        Command::Distance { doc, a, b } => commands::distance(&doc, &a, &b, f),
        Command::Collage {
            doc,
            target,
            fit,
            output,
        } => commands::collage(&doc, &target, fit, output.as_deref(), f),
        Command::Wellposed { doc, output } => commands::wellposed(&doc, output.as_deref(), f),
        Command::Render {
            cloud,
            raster,
            width,
            height,
        } => commands::render(&cloud, &raster, (width, height)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gifs: {e}");
            ExitCode::from(match e {
                CliError::Failure(_) => 1,
                CliError::Input(_) => 2,
            })
        }
    }
}
