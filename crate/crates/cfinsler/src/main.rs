use std::path::PathBuf;
use std::process::ExitCode;

use cfinsler::output::{self, Format};
use cfinsler::{load_config, run_suites, CliError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cfinsler", version, about = "Verify left-invariant complex Finsler metrics on complex Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and report residuals against tolerances.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Restrict to these suites (repeatable).
    #[arg(long = "suite")]
    suites: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiply every tolerance by this factor.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Include per-suite wall-clock times (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
}

fn verify(args: VerifyArgs) -> Result<bool, CliError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(scale) = args.tol_scale {
        cfg = cfg.with_tol_scale(scale)?;
    }
    if !args.suites.is_empty() {
        cfg = cfg.with_suites(&args.suites)?;
    }
    let outcomes = run_suites(&cfg);
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Markdown => Format::Markdown,
    };
    let text = output::render(&cfg, &outcomes, format, args.timings);
    match &args.out {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => print!("{text}"),
    }
    Ok(output::overall_pass(&outcomes))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => match verify(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
