use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "abelia", version, about = "Exact cohomology of deformed line bundles on complex tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Input description (JSON).
    path: PathBuf,
    /// Emit the JSON report instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of the input, including Poisson compatibility.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Per-degree cohomology modules.
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long = "hbar-order")]
        hbar_order: Option<usize>,
    },
    /// Compare the closed form with the Smith and spectral computations.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long = "hbar-order")]
        hbar_order: Option<usize>,
        #[arg(long = "corrupt-formula", hide = true)]
        corrupt_formula: bool,
    },
    /// Explicit cocycle representatives in one degree.
    Cocycles {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 30)]
        samples: usize,
        #[arg(long = "hbar-order")]
        hbar_order: Option<usize>,
    },
    /// Spectral sequence pages of the model complex.
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long = "dump-pages")]
        dump_pages: Option<usize>,
        #[arg(long = "hbar-order")]
        hbar_order: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (json, result) = match cli.command {
        Command::Validate { common } => (common.json, commands::validate(&common.path)),
        Command::Cohomology { common, degree, hbar_order } => {
            (common.json, commands::cohomology(&common.path, degree, hbar_order))
        }
        Command::Oracle { common, hbar_order, corrupt_formula } => {
            (common.json, commands::oracle(&common.path, hbar_order, corrupt_formula))
        }
        Command::Cocycles { common, degree, samples, hbar_order } => {
            (common.json, commands::cocycles(&common.path, degree, samples, hbar_order))
        }
        Command::Spectral { common, dump_pages, hbar_order } => {
            (common.json, commands::spectral(&common.path, dump_pages, hbar_order))
        }
    };
    match result {
        Ok(Outcome { report, text, code }) => {
            let mut out = std::io::stdout().lock();
            let _ = if json { writeln!(out, "{}", report.to_json()) } else { write!(out, "{text}") };
            ExitCode::from(code)
        }
        Err(Failure::Report { report, text, code }) => {
            let _ = if json {
                writeln!(std::io::stdout().lock(), "{}", report.to_json())
            } else {
                write!(std::io::stderr().lock(), "{text}")
            };
            ExitCode::from(code)
        }
        Err(Failure::Message { message, code }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
