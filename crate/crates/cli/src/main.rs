use std::process::ExitCode;

use clap::Parser;
use mrsc_cli::{run, Cli};

fn main() -> ExitCode {
    // Exit code 2 is reserved for failed checks; usage errors are input errors.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        // The reader went away (`mrsc enumerate ... | head`); nothing to report.
        Err(mrsc_cli::CliError::Output(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mrsc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
