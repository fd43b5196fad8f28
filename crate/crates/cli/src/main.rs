use std::process::ExitCode;

use clap::Parser;
use specshift_cli::{run, Cli, JobConfig, EXIT_INPUT};

fn main() -> ExitCode {
    let code = match JobConfig::from_cli(Cli::parse()) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("specshift: {e}");
            EXIT_INPUT
        }
    };
    ExitCode::from(code as u8)
}
