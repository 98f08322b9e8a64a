use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stabcheck_cli::{execute, report::Payload, Cli, EXIT_INTERNAL};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let run = execute(&cli, args);
    for line in &run.stderr {
        eprintln!("{}", line.trim_end());
    }
    let mut stdout = std::io::stdout().lock();
    let written = if cli.json {
        match serde_json::to_string_pretty(&run.report) {
            Ok(json) => writeln!(stdout, "{json}"),
            Err(e) => {
                eprintln!("internal error: cannot serialize report: {e}");
                return ExitCode::from(EXIT_INTERNAL);
            }
        }
    } else if matches!(run.report.result, Payload::Error(_)) {
        // Already rendered on stderr.
        Ok(())
    } else {
        write!(stdout, "{}", run.text)
    };
    if written.is_err() {
        return ExitCode::from(EXIT_INTERNAL);
    }
    ExitCode::from(run.exit_code)
}
