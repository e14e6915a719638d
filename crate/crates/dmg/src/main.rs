use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use dmg::cli::Cli;
use dmg::commands;
use dmg::config::RunConfig;
use dmg::exit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::INVALID_CONFIG),
            };
        }
    };
    let flags = cli.flags();
    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(file) => file.layered(flags),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
        },
        None => flags,
    };
    match commands::run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
