use std::process::ExitCode;

use clap::Parser;
use recoherence_cli::{execute, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(status) => {
            match status {
                Status::CertifierFail => eprintln!("certifier verdict: fail"),
                Status::SelfCheckViolation => eprintln!("self-check violated"),
                Status::Success => {}
            }
            ExitCode::from(status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
