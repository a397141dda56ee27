//! `subpack`: build instances, run exchanges, certify schedules, and sweep rates.
//!
//! Exit codes: 0 ok, 2 validation, 3 I/O, 4 decode failure, 5 oracle or check failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_DECODE: u8 = 4;
pub const EXIT_ORACLE: u8 = 5;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
