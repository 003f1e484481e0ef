use clap::Parser;
use mutrans_cli::commands::{run, CommandError};
use mutrans_cli::config::{resolve, RunConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(1);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e @ CommandError::Usage(_)) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let text = report.to_json();
    match &cfg.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("usage error: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    for v in report.verdicts.iter().filter(|v| !v.passed) {
        eprintln!("FAIL {}", v.name);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
