//! `sone-index`: command-line driver for the index experiments.
//!
//! Exit codes: 0 verdict pass, 2 verdict fail, 64 invalid configuration, 1 anything else.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use sone_index::Error;

use args::{Cli, Command};
use output::Artifacts;

const EXIT_FAIL: u8 = 2;
const EXIT_CONFIG: u8 = 64;
const EXIT_CRASH: u8 = 1;

fn run(cli: &Cli) -> sone_index::Result<bool> {
    let cfg = args::resolve(cli.command.common())?;
    match cli.command {
        Command::Heat(_) | Command::Fourier(_) => cfg.validate_unseeded()?,
        _ => cfg.validate()?,
    }
    let mut out = Artifacts::create(args::output_dir(&cfg))?;
    let passed = match &cli.command {
        Command::Index(_) => commands::index(&cfg, &mut out)?,
        Command::Suite(_) => commands::suite(&cfg, &mut out)?,
        Command::Heat(_) => commands::heat(&cfg, &mut out)?,
        Command::Sample(a) => commands::sample(&cfg, a.exit_radius, a.dump, &mut out)?,
        Command::Fourier(a) => commands::fourier(&cfg, a.max_mode, &mut out)?,
    };
    let dir = out.finish(cli.command.name(), &cfg, passed)?;
    println!("artifacts in {}", dir.display());
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verdict: fail");
            ExitCode::from(EXIT_FAIL)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidConfig(_)
                | Error::UnknownSpace(_)
                | Error::NonPositiveTime(_)
                | Error::Unsupported(..) => EXIT_CONFIG,
                _ => EXIT_CRASH,
            };
            ExitCode::from(code)
        }
    }
}
