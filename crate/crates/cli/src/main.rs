//! `finsler` command-line front end.

mod output;
mod run;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "finsler",
    version,
    about = "Funk and Hilbert geometry computations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lagrangian and fundamental tensor at given or sampled (x, y).
    Eval(Common),
    /// Pairwise Funk, reverse Funk and Hilbert distances.
    Distance(Common),
    /// Geodesic traces, with deviation from the closed form when known.
    Geodesic {
        #[command(flatten)]
        common: Common,
        /// Final parameter; Hilbert traces also run to its negative.
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        s_end: f64,
    },
    /// Flag curvature over sampled flags, with a summary.
    Curvature(Common),
    /// Run the acceptance suite.
    Verify(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Body as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub body: Option<String>,
    /// Metric name (funk, reverse-funk, hilbert, klein, spherical,
    /// euclidean, conformal, minkowski), inline JSON or a JSON file.
    #[arg(long, default_value = "funk")]
    pub metric: String,
    /// Dimension for metrics without a body.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Probe points as inline JSON or a JSON file.
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 20240611)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub quick: bool,
    /// Flip a sign in the curvature formula (harness self-test).
    #[arg(long)]
    pub inject_bug: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FINSLER_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run::run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
