use std::process::ExitCode;

use clap::Parser;
use cosmic_string_cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    // clap reports its own usage errors with status 2.
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
