use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nullgauge_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    let text = if cli.json { out.envelope.to_json() } else { out.envelope.to_text() };
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if !cli.json {
        if let Some(e) = &out.envelope.error {
            eprintln!("error: {}", e.message);
        }
    }
    ExitCode::from(out.code as u8)
}
