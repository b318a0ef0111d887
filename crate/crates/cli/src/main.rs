//! `netspace`: batch front end for the constructions, probes and training experiments.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use output::{CliError, RunDir};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let common = cli.command.common().clone();

    let dir = match RunDir::create(&common.out, common.force) {
        Ok(dir) => dir,
        Err(e) => return fail(&e),
    };
    let result = commands::run(&cli.command);
    let elapsed = started.elapsed().as_secs_f64();

    let manifest = match dir.finish(&cli.command, &result, elapsed) {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    if common.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&manifest).expect("manifest is plain JSON")
        );
    }
    match result {
        Ok(artifacts) => {
            if !common.json {
                println!("{}", artifacts.summary);
                println!("wrote {}", dir.root().display());
            }
            match artifacts.failure {
                None => ExitCode::SUCCESS,
                Some(f) => fail(&CliError::Failed(f)),
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
