use std::process::ExitCode;

use clap::Parser;
use rwre_cli::{execute, Cli, SEED_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = std::env::var(SEED_ENV).ok();
    match execute(&cli, env_seed.as_deref(), &mut std::io::stdout().lock()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
