use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod problem;
mod report;

use commands::{CliError, Options};
use problem::ProblemFile;
use report::Format;

/// Conservation laws of diffusion-convection equations: exact symbolic
/// verification, classification, transformation and numeric cross-checks.
#[derive(Parser)]
#[command(name = "diffconv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report layout.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    /// Drift tolerance for numcheck.
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol: f64,
    /// Seed for random equivalence elements.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Dimensions for catalog and brackets, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Catalog case pattern such as `Tab2.*` or `Thm3.1,Cor1.*`.
    #[arg(long = "case", global = true, default_value = "*")]
    case: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check each conserved vector (and characteristic) on the system.
    Verify { file: PathBuf },
    /// Run the direct method and print the determining and classifying equations.
    Split { file: PathBuf },
    /// Verify catalog cases; `--case` and `--n` select them.
    Catalog {
        /// Overrides `--case`.
        ids: Option<String>,
    },
    /// Push conserved vectors through a change of variables or an equivalence.
    Transform { file: PathBuf },
    /// Variational checks and Noether vectors for the declared generators.
    Noether { file: PathBuf },
    /// Solve the equation on a grid and monitor each conserved quantity.
    Numcheck { file: PathBuf },
    /// Check bracket relations from a file, or the catalog ones without it.
    Brackets { file: Option<PathBuf> },
}

fn load(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(ProblemFile::parse(&text)?)
}

fn run(cli: Cli) -> Result<report::Report, CliError> {
    let mut opts = Options {
        tol: cli.tol,
        seed: cli.seed,
        n: cli.n,
        case: cli.case,
    };
    match cli.command {
        Command::Verify { file } => commands::verify(&load(&file)?),
        Command::Split { file } => commands::split(&load(&file)?),
        Command::Catalog { ids } => {
            if let Some(ids) = ids {
                opts.case = ids;
            }
            commands::catalog(&opts)
        }
        Command::Transform { file } => commands::transform(&load(&file)?, &opts),
        Command::Noether { file } => commands::noether(&load(&file)?),
        Command::Numcheck { file } => commands::numcheck(&load(&file)?, &opts),
        Command::Brackets { file } => match file {
            Some(f) => commands::brackets(Some(&load(&f)?), &opts),
            None => commands::brackets(None, &opts),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(r) => {
            print!("{}", r.render(format));
            ExitCode::from(r.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
