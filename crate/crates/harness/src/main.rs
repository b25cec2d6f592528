use clap::Parser;
use fareycount_harness::cli::{execute, Cli};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.line);
            match outcome.failure {
                Some(msg) => {
                    eprintln!("property failure: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("fareycount: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
