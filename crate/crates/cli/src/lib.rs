//! Command-line front end for `airybasis`: table data as CSV/JSON and a verification suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use config::{Cli, Command, Format, RunConfig};
pub use error::{CliError, CliResult};

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("airybasis: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> CliResult<()> {
    let cfg = config::resolve(command)?;
    let (table, failed) = match command {
        Command::Eigs(_) => (commands::eigs(&cfg)?, 0),
        Command::Eigenfunctions(_) => (commands::eigenfunctions(&cfg)?, 0),
        Command::Bounce(_) => (commands::bounce(&cfg)?, 0),
        Command::Grin(_) => (commands::grin(&cfg)?, 0),
        Command::Verify(_) => verify::verify(&cfg)?,
    };
    let text = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(cfg.meta()),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if failed > 0 {
        return Err(CliError::Verification(failed));
    }
    Ok(())
}
