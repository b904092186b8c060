//! `muskat`: batch front end for the interface laboratory.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "muskat",
    version,
    about = "Muskat interface simulations and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration, check it against the monitors and write a run directory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output_dir`, then `./run`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite that needs no simulation.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = muskat_core::identities::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = muskat_core::identities::DEFAULT_DRAWS)]
        draws: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the config at every eps of its schedule and measure the Cauchy rate.
    Continuation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "continuation")]
        out: PathBuf,
    },
    /// Fit the stability envelope between two run directories.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local norms of a function given as an `x,f` CSV.
    Norms {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = muskat_core::config::DEFAULT_GAMMA)]
        gamma: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("MUSKAT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("MUSKAT_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|()| match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, out),
        Command::Verify {
            suite: Suite::Identities,
            seed,
            draws,
            out,
        } => commands::verify(seed, draws, &out),
        Command::Continuation { config, out } => commands::continuation(&config, &out),
        Command::Compare { a, b, mu, out } => commands::compare(&a, &b, mu, out.as_deref()),
        Command::Norms { csv, gamma } => commands::norms(&csv, gamma),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
