use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use wigstat_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Help and version requests print to stdout and exit with 0.
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("{e}");
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("wigstat: {err}");
            if err.code() == 2 {
                eprintln!("run `wigstat <subcommand> --help` for the accepted flags");
            }
            err.exit_code()
        }
    }
}
