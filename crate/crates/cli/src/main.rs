mod args;
mod checks;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Hamiltonian(a) => commands::hamiltonian(a),
        Command::Dims(a) => commands::dims(a),
        Command::Cayley(a) => commands::cayley(a),
        Command::Report(a) => commands::report(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
