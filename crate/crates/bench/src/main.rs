use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = bagsel_bench::cli::Cli::parse();
    match bagsel_bench::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
