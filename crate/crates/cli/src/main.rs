use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use umbilic_cli::{exit, run, Cli, CliError};

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("UMBILIC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("UMBILIC_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Consistency(format!("thread pool: {e}")))
}

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| run(&cli))
        .and_then(|outcome| emit(&cli, &outcome.body).map(|()| outcome.code));
    let code = match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    if code != exit::OK {
        eprintln!("umbilic: exiting with status {code}");
    }
    ExitCode::from(code as u8)
}
