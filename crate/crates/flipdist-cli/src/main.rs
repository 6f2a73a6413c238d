use clap::Parser;
use flipdist_cli::{run, Cli, CliError};
use std::process::ExitCode;

fn main() -> ExitCode {
    // clap exits with code 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Report(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
