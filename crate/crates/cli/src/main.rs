use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

mod commands;
mod error;

use involute_core::config::{Mode, OutputFormat};
use involute_core::Rational;

/// Build and verify fixed-point-free involutions with prescribed
/// discontinuity sets.
#[derive(Parser, Debug)]
#[command(name = "involute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the construction and write its pair records.
    Build(Common),
    /// Print f(p) for each --point.
    Eval(Common),
    /// Run the property suite and print its JSON report.
    Verify(Common),
    /// Certificates at F-points and continuity reports at Q-points.
    Witness(Common),
    /// Sigma-baseline value table and suite.
    Sigma(Common),
    /// Plot data: (x, f(x)) over every processed point.
    Export(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Steps to run; overrides the config.
    #[arg(long)]
    pub steps: Option<usize>,
    /// A rational such as 1/3; may be repeated.
    #[arg(long = "point", value_parser = parse_rational)]
    pub points: Vec<Rational>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    #[arg(long, default_value = "warn")]
    pub log_level: LevelFilter,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Build(a) => (Mode::Build, a),
        Command::Eval(a) => (Mode::Eval, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::Witness(a) => (Mode::Witness, a),
        Command::Sigma(a) => (Mode::Sigma, a),
        Command::Export(a) => (Mode::Export, a),
    };
    env_logger::Builder::new().filter_level(args.log_level).format_timestamp(None).init();
    match commands::dispatch(mode, &args) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
