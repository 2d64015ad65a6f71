use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use snc_cli::{run, Cli, Outcome};

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    let code = outcome.exit_code() as u8;
    match outcome {
        Outcome::Success(s) | Outcome::VerificationFailed(s) => {
            let _ = std::io::stdout().write_all(s.as_bytes());
        }
        Outcome::InputError(s) => {
            let _ = std::io::stderr().write_all(s.as_bytes());
        }
    }
    ExitCode::from(code)
}
