//! Command-line front end for `abstain-core`.
//!
//! Every subcommand reads the built-in defaults, then an optional JSON file
//! (`--config`), then flags, validates the result, and writes CSV files
//! (and SVG plots for the figure commands) into `--out`, or prints the CSVs
//! to standard output when no directory is given.
//!
//! `ABSTAIN_HT_THREADS` caps the number of worker threads. Results do not
//! depend on it.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub mod brute;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use commands::Outcome;
pub use config::{AdversaryKind, CommandKind, ModelKind, Overrides, ProbSpec, RunConfig};
pub use error::{CliError, Result};

pub const THREADS_ENV: &str = "ABSTAIN_HT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "abstain-ht", version, about = "Error exponents and detectors for hypothesis testing with abstention")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solver value, minimiser and certificate per model, eps and radius.
    Exponent(Flags),
    /// Trade-off curves over a lambda01 sweep.
    Region(Flags),
    /// Data and plot for the trade-off figure.
    Figure4(Flags),
    /// Data and plot for the exponent-against-eps figure.
    Figure5(Flags),
    /// Exact finite-sample errors and fitted rates.
    FiniteN(Flags),
    /// Monte Carlo error frequencies.
    Simulate(Flags),
    /// Cross-checks between solvers.
    Validate(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Self::Exponent(f) => (CommandKind::Exponent, f),
            Self::Region(f) => (CommandKind::Region, f),
            Self::Figure4(f) => (CommandKind::Figure4, f),
            Self::Figure5(f) => (CommandKind::Figure5, f),
            Self::FiniteN(f) => (CommandKind::FiniteN, f),
            Self::Simulate(f) => (CommandKind::Simulate, f),
            Self::Validate(f) => (CommandKind::Validate, f),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// P0 as comma-separated probabilities, or one number p for Ber(p).
    #[arg(long, value_delimiter = ',')]
    pub p0: Option<Vec<f64>>,
    /// P1, same format as --p0.
    #[arg(long, value_delimiter = ',')]
    pub p1: Option<Vec<f64>>,
    /// Contamination level(s).
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Radius (or radii) of the ball around P1.
    #[arg(long, value_delimiter = ',')]
    pub lambda01: Option<Vec<f64>>,
    /// Radius of the ball around P0.
    #[arg(long)]
    pub lambda10: Option<f64>,
    /// Detector back-off in bits.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Contamination models.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub model: Option<Vec<ModelKind>>,
    /// Sample size(s).
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Monte Carlo experiments per hypothesis.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Base seed for random streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sweep points for `region` and `figure4`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Absolute tolerance for `validate`.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Adversary for `simulate`.
    #[arg(long, value_enum)]
    pub adversary: Option<AdversaryKind>,
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            p0: self.p0.clone().map(ProbSpec::from_values),
            p1: self.p1.clone().map(ProbSpec::from_values),
            eps: self.eps.clone().map(config::OneOrMany::Many),
            lambda01: self.lambda01.clone().map(config::OneOrMany::Many),
            lambda10: self.lambda10,
            delta: self.delta,
            models: self.model.clone(),
            solver: None,
            n_grid: self.n.clone().map(config::OneOrMany::Many),
            samples: self.samples,
            seed: self.seed,
            points: self.points,
            tolerance: self.tolerance,
            adversary: self.adversary,
        }
    }

    pub fn resolve(&self, cmd: CommandKind) -> Result<RunConfig> {
        let mut cfg = RunConfig::resolve(cmd, self.config.as_deref(), self.overrides())?;
        cfg.out.clone_from(&self.out);
        Ok(cfg)
    }
}

/// Worker count from `ABSTAIN_HT_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(format!("{THREADS_ENV} = {s:?} must be a positive integer"))),
        },
    }
}

/// Runs `f` on a pool of `threads` workers (rayon's default when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn write_artifacts(outcome: &Outcome, dir: Option<&Path>) -> Result<()> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_owned(), source })?;
            for a in &outcome.artifacts {
                let path = dir.join(&a.file_name);
                std::fs::write(&path, &a.contents).map_err(|source| CliError::Io { path, source })?;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            let io = |source| CliError::Io { path: "<stdout>".into(), source };
            for (i, a) in outcome.artifacts.iter().filter(|a| a.file_name.ends_with(".csv")).enumerate() {
                if i > 0 {
                    writeln!(out).map_err(io)?;
                }
                out.write_all(a.contents.as_bytes()).map_err(io)?;
            }
            if outcome.artifacts.iter().any(|a| !a.file_name.ends_with(".csv")) {
                eprintln!("note: plots are only written with --out");
            }
        }
    }
    Ok(())
}

/// Validates, computes, writes. Budget refusals and failed checks are
/// reported after the files are written.
pub fn execute(cmd: CommandKind, cfg: &RunConfig) -> Result<Outcome> {
    let outcome = with_threads(thread_cap()?, || commands::run(cmd, cfg))??;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    write_artifacts(&outcome, cfg.out.as_deref())?;
    if !outcome.refusals.is_empty() {
        return Err(CliError::Budget(outcome.refusals.clone()));
    }
    if let Some((failed, total)) = outcome.checks {
        if failed > 0 {
            return Err(CliError::Validation { failed, total });
        }
    }
    Ok(outcome)
}

/// Entry point shared by the binary and the tests. Returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (cmd, flags) = cli.command.split();
    let result = flags.resolve(cmd).and_then(|cfg| execute(cmd, &cfg));
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
