use std::process::ExitCode;

use clap::Parser;
use ldm_lab::Cli;

fn main() -> ExitCode {
    match ldm_lab::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
