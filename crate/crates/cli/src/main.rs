use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xpair::commands::{run_grid, run_rates, run_report, run_sample, write_grid, write_sample, CliError};
use xpair::scenario::GridQuantity;
use xpair::Scenario;

#[derive(Parser)]
#[command(
    name = "xpair",
    version,
    about = "Two-photon emission from double Compton scattering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the [grid] section and write a CSV grid.
    Grid {
        #[command(flatten)]
        common: Common,
        /// Override grid.quantity (cross-section, yield, photon2-integrated, single-compton).
        #[arg(long)]
        quantity: Option<String>,
    },
    /// Rate or yield curve over the detector energies, as JSON.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Draw photon pairs from the [sampler] region.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Override sampler.events.
        #[arg(long)]
        events: Option<usize>,
    },
    /// Derived scalar quantities (and rates when available), as JSON.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative tolerance of adaptive integrations.
    #[arg(long)]
    tol: Option<f64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("XPAIR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("XPAIR_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Grid { common, quantity } => {
            let s = Scenario::from_path(&common.scenario)?;
            let q = quantity
                .map(|n| {
                    GridQuantity::from_name(&n).ok_or_else(|| {
                        CliError::Validation(format!("--quantity {n:?}: expected one of {}", GridQuantity::names()))
                    })
                })
                .transpose()?;
            let g = run_grid(&s, common.tol, q)?;
            write_grid(&g, common.out.as_deref())
        }
        Command::Rates { common } => {
            let s = Scenario::from_path(&common.scenario)?;
            run_rates(&s, common.tol)?.write(common.out.as_deref())
        }
        Command::Report { common } => {
            let s = Scenario::from_path(&common.scenario)?;
            run_report(&s, common.tol)?.write(common.out.as_deref())
        }
        Command::Sample { common, events } => {
            let s = Scenario::from_path(&common.scenario)?;
            let o = run_sample(&s, events, common.seed)?;
            write_sample(&o, common.out.as_deref())?;
            eprintln!("{}", o.summary());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
