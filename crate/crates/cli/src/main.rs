use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liouville_sync_cli::commands::{run, Command, RunContext};
use liouville_sync_cli::config::Config;
use liouville_sync_cli::CliError;

#[derive(Parser)]
#[command(name = "liouville-sync", version, about = "Spectral and synchronization analysis of Lindblad models")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML (or .json) run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Structural tolerance, overrides the config value.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RNG seed, overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; falls back to LIOUVILLE_SYNC_THREADS.
    #[arg(long, global = true, env = "LIOUVILLE_SYNC_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Liouvillian spectrum, peripheral set and stationary states.
    Spectrum,
    /// Dynamical symmetries, commutant and the no-synchronization certificate.
    Symmetries,
    /// Time evolution of observables and Bloch vectors.
    Evolve,
    /// Synchronization classification of site pairs.
    SyncReport,
    /// Eigenvalue tracking along a parameter family.
    Sweep,
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Schema("--config is required".into()))?;
    let cfg = Config::load(path)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Schema("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Schema(format!("cannot configure thread pool: {e}")))?;
    }
    let ctx = RunContext::new(&cfg, cli.out.clone(), cli.tol, cli.seed)?;
    let cmd = match cli.command {
        Sub::Spectrum => Command::Spectrum,
        Sub::Symmetries => Command::Symmetries,
        Sub::Evolve => Command::Evolve,
        Sub::SyncReport => Command::SyncReport,
        Sub::Sweep => Command::Sweep,
    };
    run(cmd, &cfg, &ctx)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
