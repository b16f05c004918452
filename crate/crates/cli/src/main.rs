mod args;
mod commands;
mod inputs;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use args::{Cli, Command, PairsCommand};

fn run(cli: Cli) -> Result<commands::Failures> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let seed = cli.global.seed;
    match &cli.command {
        Command::Tokenize(a) => commands::tokenize(a, &cli.global.vocab()?),
        Command::Detokenize(a) => commands::detokenize(a, &cli.global.vocab()?),
        Command::Roundtrip(a) => commands::roundtrip(a, &cli.global.vocab()?),
        Command::Stats(a) => commands::stats(a),
        Command::Sample(a) => commands::sample(a, seed),
        Command::Metrics(a) => commands::metrics(a, seed),
        Command::Pack(a) => commands::pack(a, &cli.global.vocab()?, seed),
        Command::Curate(a) => commands::curate(a),
        Command::Pairs(PairsCommand::Build(a)) => commands::pairs_build(a),
        Command::Pairs(PairsCommand::Merge(a)) => commands::pairs_merge(a),
        Command::Dpo(a) => commands::dpo(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} item(s) failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
