use std::process::ExitCode;

use clap::Parser;
use insightd::cli::{self, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cli::run(&args),
        Command::Serve(args) => match cli::serve(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("insightd: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}
