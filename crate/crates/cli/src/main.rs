mod args;
mod commands;
mod provenance;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::CliError;
use provenance::Provenance;

/// Environment variable holding the worker-thread count.
const THREADS_VAR: &str = "MIMO_BOUNDS_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), CliError> {
    configure_threads()?;
    let prov = Provenance::new(argv, cli.reproducible);
    match &cli.command {
        Command::Geom(a) => commands::geom(a, prov),
        Command::Assemble(a) => commands::assemble(a, prov),
        Command::Modes(a) => commands::modes(a, prov),
        Command::Bound(a) => commands::bound(a, prov),
        Command::Sweep(a) => commands::sweep_cmd(a, prov),
        Command::Count(a) => commands::count(a, prov),
        Command::Subregion(a) => commands::subregion(a, prov),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
