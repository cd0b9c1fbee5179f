//! `walkcount`: exact and asymptotic walk counts from the command line.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use walkcount::numlinalg::DEFAULT_TOL;
use walkcount::Error;

use crate::input::InputArgs;

#[derive(Parser, Debug)]
#[command(name = "walkcount", version, about = "Walk counting in digraphs and regular languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[command(flatten)]
    pub input: InputArgs,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Rank tolerance used throughout.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum, closed form, dominant term and growth coefficients.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Largest length compared against the counting oracle.
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Exact number of accepted words (or walks) of one length.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        length: usize,
    },
    /// Spectral projectors and their axiom residuals.
    Projectors {
        #[command(flatten)]
        common: Common,
    },
    /// Drazin inverse of the adjacency matrix.
    Drazin {
        #[command(flatten)]
        common: Common,
    },
    /// Exact and spectral adjugate of the adjacency matrix.
    Adjugate {
        #[command(flatten)]
        common: Common,
    },
    /// Dominant components, periodic classes and masked eigenpairs.
    Classes {
        #[command(flatten)]
        common: Common,
    },
    /// Run every invariant check against the input.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
}

/// Exit code for a library error: 2 for bad input, 3 for numerical trouble.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_)
        | Error::Parse { .. }
        | Error::Syntax { .. }
        | Error::Precondition(_)
        | Error::Json(_) => 2,
        Error::Nilpotent | Error::Singular(_) | Error::Numerical(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { common, depth } => commands::analyze(common, *depth),
        Command::Count { common, length } => commands::count(common, *length),
        Command::Projectors { common } => commands::projectors(common),
        Command::Drazin { common } => commands::drazin(common),
        Command::Adjugate { common } => commands::adjugate(common),
        Command::Classes { common } => commands::classes(common),
        Command::Validate { common, depth } => commands::validate(common, *depth),
    };
    match result {
        Ok(outcome) => {
            // a closed pipe (e.g. `| head`) is not an error worth a panic
            let _ = writeln!(std::io::stdout().lock(), "{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
