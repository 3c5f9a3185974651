mod args;
mod commands;
mod config;
mod error;

use clap::Parser;

use args::{Cli, Command};
use config::RunConfig;
use error::{usage, CliResult};

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cli.apply_globals(&mut cfg);
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Beta(a) => {
            a.apply(&mut cfg);
            commands::cmd_beta(cfg)
        }
        Command::Sample(a) => {
            a.apply(&mut cfg);
            commands::cmd_sample(cfg)
        }
        Command::Calibrate(a) => {
            a.apply(&mut cfg);
            commands::cmd_calibrate(cfg)
        }
        Command::Train(a) => {
            a.apply(&mut cfg);
            commands::cmd_train(cfg)
        }
        Command::GenData(a) => {
            let n = commands::cmd_gen_data(a)?;
            println!("wrote {n} patterns to {}", a.out.display());
            Ok(())
        }
    }
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
