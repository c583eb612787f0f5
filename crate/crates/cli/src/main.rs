use std::process::ExitCode;

use clap::Parser;
use rcgs_cli::Cli;

fn main() -> ExitCode {
    match rcgs_cli::run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rcgs: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
