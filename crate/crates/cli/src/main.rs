use std::process::ExitCode;

use clap::Parser;
use qep_cli::{Cli, VALIDATION_EXIT_CODE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match qep_cli::run(cli).map_err(anyhow::Error::from) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(VALIDATION_EXIT_CODE)
        }
    }
}
