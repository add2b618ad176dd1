//! Command-line driver for the Wigner statistics experiments. Every
//! subcommand writes CSV tables headed by the full configuration.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::{Cli, Command, CommandKind};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use output::{read_csv, write_csv, Table, Value};

/// Runs a parsed command line. Returns the summary lines printed on success
/// followed by the paths of the files written.
pub fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let (kind, args) = cli.command.split();
    let config = ExperimentConfig::from_args(kind, args)?;
    let mut sink = commands::Sink::new(&config)?;
    let mut lines = commands::execute(&config, &mut sink)?;
    lines.extend(
        sink.written
            .iter()
            .map(|p| format!("wrote {}", p.display())),
    );
    Ok(lines)
}
