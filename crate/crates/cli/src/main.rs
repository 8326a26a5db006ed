use std::process::ExitCode;

use clap::Parser;

use qfhm_cli::{run, Cli, ERROR_EXIT};

fn threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("QFHM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("QFHM_THREADS must be a positive integer, got '{}'", raw))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads()
        .map_err(|e| e.to_string())
        .and_then(|()| run(&cli.command).map_err(|e| e.to_string()));
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(ERROR_EXIT as u8)
        }
    }
}
