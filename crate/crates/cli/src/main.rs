//! `hdc`: feature ranking, training, evaluation, sweeps and orthogonality
//! histograms for the AMS hyperdimensional classifier.
//!
//! Exit codes: 0 success, 2 usage, 3 data/schema, 4 computation, 1 other
//! (for example an unwritable output directory).

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use hdc_core::ErrorClass;

use config::{RunConfig, UsageError};
use report::OutDir;

#[derive(Parser)]
#[command(name = "hdc", version, about = "Hyperdimensional AMS classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank features by mutual information with the label.
    Mi(Flags),
    /// Train a model and save it.
    Train(Flags),
    /// Evaluate a saved model on the test split.
    Eval(Flags),
    /// Sweep sources x dimensionalities (x schemes).
    Bench(Flags),
    /// Pairwise Hamming histograms of position and thermometer HVs.
    Orthohist(Flags),
}

/// Overrides for config keys. Every flag is optional; unset flags fall back
/// to the config file, then to built-in defaults.
#[derive(Args)]
struct Flags {
    /// Flat key=value config file (a previous run's manifest.txt works).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    /// binary | multiclass
    #[arg(long)]
    scheme: Option<String>,
    /// projection | symbolic
    #[arg(long)]
    variant: Option<String>,
    /// pseudo | sobol | hadamard
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Dither strength for binarization.
    #[arg(long)]
    alpha: Option<String>,
    /// stratified | subject
    #[arg(long)]
    split: Option<String>,
    /// Training fraction of the split.
    #[arg(long)]
    fraction: Option<String>,
    /// Retraining epochs (0 = one-shot).
    #[arg(long)]
    epochs: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Model file (default <out>/model.amshd).
    #[arg(long)]
    model: Option<String>,
    /// positive | top:K
    #[arg(long)]
    selection: Option<String>,
    /// MI nearest-neighbour count.
    #[arg(long)]
    k: Option<String>,
    /// binary | score
    #[arg(long)]
    mi_target: Option<String>,
    /// Query bit-flip rate for a noise evaluation (eval).
    #[arg(long)]
    flip_rate: Option<String>,
    /// Comma-separated schemes (bench).
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated sources (bench).
    #[arg(long)]
    sources: Option<String>,
    /// Comma-separated dimensionalities (bench, orthohist).
    #[arg(long)]
    dims: Option<String>,
    /// Number of HVs per histogram (orthohist).
    #[arg(long)]
    count: Option<String>,
    /// Histogram bins (orthohist).
    #[arg(long)]
    bins: Option<String>,
    /// Worker threads (bench).
    #[arg(long)]
    jobs: Option<String>,
}

impl Flags {
    fn resolve(self) -> Result<RunConfig> {
        let pairs = [
            ("dataset", self.dataset),
            ("out", self.out),
            ("model", self.model),
            ("scheme", self.scheme),
            ("variant", self.variant),
            ("source", self.source),
            ("dim", self.dim),
            ("seed", self.seed),
            ("alpha", self.alpha),
            ("split", self.split),
            ("fraction", self.fraction),
            ("epochs", self.epochs),
            ("selection", self.selection),
            ("k", self.k),
            ("mi_target", self.mi_target),
            ("flip_rate", self.flip_rate),
            ("schemes", self.schemes),
            ("sources", self.sources),
            ("dims", self.dims),
            ("count", self.count),
            ("bins", self.bins),
            ("jobs", self.jobs),
        ];
        RunConfig::resolve(self.config.as_deref(), &pairs)
    }
}

type Handler = fn(&RunConfig, &OutDir) -> Result<()>;

fn run(cli: Cli) -> Result<()> {
    let (name, flags, cmd): (&str, Flags, Handler) = match cli.command {
        Command::Mi(f) => ("mi", f, commands::mi),
        Command::Train(f) => ("train", f, commands::train),
        Command::Eval(f) => ("eval", f, commands::eval),
        Command::Bench(f) => ("bench", f, commands::bench),
        Command::Orthohist(f) => ("orthohist", f, commands::orthohist),
    };
    let cfg = flags.resolve()?;
    let out = OutDir::create(&cfg.out)?;
    out.write("manifest.txt", cfg.manifest(name))?;
    cmd(&cfg, &out)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<hdc_core::Error>() {
            return match e.class() {
                ErrorClass::Data => 3,
                ErrorClass::Computation => 4,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
