//! `fracpow`: compute `A^alpha b`, emit threshold tables and bound traces,
//! and run the reference verification grid.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRACPOW_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => commands::compute(a),
        Command::Thresholds(a) => commands::thresholds(a),
        Command::BoundTrace(a) => commands::bound_trace(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::Status::InputError as u8)
        }
    }
}
