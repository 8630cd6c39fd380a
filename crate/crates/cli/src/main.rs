use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use floodcast_cli::{execute, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Check(report)) => {
            let _ = writeln!(std::io::stderr(), "{report}");
            ExitCode::from(1)
        }
        Err(err) => {
            let _ = writeln!(
                std::io::stderr(),
                "{}",
                serde_json::json!({ "error": err.to_string() })
            );
            ExitCode::from(1)
        }
    }
}
