use std::process::ExitCode;

use harmosc::cli::{self, CliError};

fn main() -> ExitCode {
    let result = cli::parse_config(std::env::args_os()).and_then(|config| cli::run(&config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Usage(text) => eprint!("{text}"),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
