use std::process::ExitCode;

use clap::Parser;
use fracap_cli::commands::run;
use fracap_cli::config::{Format, RunConfig};
use fracap_cli::report::{to_csv, to_json};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let report = run(&cfg);
    if !report.records.is_empty() || report.error.is_none() {
        let text = match cfg.output {
            Format::Json => to_json(&report.records),
            Format::Csv => to_csv(&report.records),
        };
        let written = match &cfg.out {
            Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        };
        if let Err(msg) = written {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(report.exit_code())
}
