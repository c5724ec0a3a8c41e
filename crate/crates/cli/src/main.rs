//! `attrmeaning` command-line interface.
//!
//! Exit codes: 0 success, 2 usage, 3 input or format, 4 numeric failure.

mod args;
mod commands;
mod error;
mod io;
mod model;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let argv: Vec<String> = std::env::args_os()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    if let Err(e) = commands::run(cli, argv) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
