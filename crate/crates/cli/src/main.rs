#![forbid(unsafe_code)]

mod args;
mod commands;
mod exit;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => return ExitCode::from(exit::from_clap_error(&error)),
    };
    ExitCode::from(commands::dispatch(cli))
}
