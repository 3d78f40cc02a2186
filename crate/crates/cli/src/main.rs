use std::process::ExitCode;

use clap::Parser;
use cmi_cli::args::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut doc, out) = match execute(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    doc.stamp();
    match out {
        Some(path) => {
            if let Err(e) = doc.write_to(&path) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{}", doc.render()),
    }
    ExitCode::SUCCESS
}
