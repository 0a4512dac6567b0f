use std::process::ExitCode;

use clap::Parser;
use loewner_cli::{run, Cli, Output};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Output::default();
    let result = run(&cli, &mut out);
    for line in &out.stdout {
        println!("{line}");
    }
    for line in &out.stderr {
        eprintln!("{line}");
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
