use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = glyph_cli::Cli::parse();
    match glyph_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
