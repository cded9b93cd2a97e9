use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use sosdeg_cli::{exit_code, render, run, Cli, EXIT_COMPUTATION, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    panic::set_hook(Box::new(|info| eprintln!("error: internal failure: {info}")));
    let result = panic::catch_unwind(|| {
        let report = run(&cli.command)?;
        let text = render(&report)?;
        match &cli.output {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        anyhow::Ok(())
    });
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
        Err(_) => ExitCode::from(EXIT_COMPUTATION as u8),
    }
}
