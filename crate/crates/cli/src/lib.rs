//! Command-line front end: figure data as CSV, eigen tables and reports as
//! JSON, and the acceptance suite.

pub mod acceptance;
pub mod args;
pub mod commands;
pub mod error;
pub mod grid;
pub mod output;

use args::{Cli, Command};
use commands::{Context, CurveCommand};
use error::CliError;
use trapfpt::spectral::EigenCache;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // fails only if a pool already exists, which is harmless here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Context {
        cache: if cli.no_cache { None } else { cli.cache_dir.clone().map(EigenCache::new) },
    };
    match &cli.command {
        Command::Eigen(a) => commands::eigen(&ctx, a),
        Command::Survival(a) => commands::curves(&ctx, a, CurveCommand::Survival),
        Command::Fpt(a) => commands::curves(&ctx, a, CurveCommand::Density),
        Command::Mfpt(a) => commands::mfpt(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Escape(a) => commands::escape(&ctx, a),
        Command::Verify(a) => commands::verify(a),
    }
}
