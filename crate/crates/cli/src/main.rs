mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "speechrec",
    version,
    about = "Isolated-word recognition: MFCC + k-means features and a sigmoid feed-forward classifier"
)]
struct Cli {
    /// Flat TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Treat any per-file featurization failure as fatal (exit 2).
    #[arg(long, global = true)]
    strict: bool,
    /// Output path (directory for `synth`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the resolved configuration as TOML.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic tone-word corpus of 44.1 kHz WAV files.
    Synth {
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 30)]
        samples: usize,
    },
    /// Turn `<corpus>/<label>/*.wav` into a feature file, plus train/test splits.
    Featurize { corpus: PathBuf },
    /// Train a classifier on a feature file.
    Train { features: PathBuf },
    /// Score a model on a feature file.
    Evaluate { model: PathBuf, features: PathBuf },
    /// Classify one WAV file.
    Predict { model: PathBuf, wav: PathBuf },
    /// Compare backprop gradients with finite differences on a (K*C, 20, classes) net.
    Gradcheck {
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 60)]
        classes: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<Fault>,
    },
}

/// Deliberate gradient corruptions for exercising `gradcheck`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    BiasSignFlip,
    WeightDouble,
}

/// A command failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn partial(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn audio(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref()).map_err(Failure::usage)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.print_config {
        print!("{}", cfg.to_toml());
    }
    let out = cli.out;
    match cli.command {
        None if cli.print_config => Ok(()),
        None => Err(Failure::usage("no command given; see --help")),
        Some(Command::Synth { classes, samples }) => commands::synth(&cfg, out, classes, samples),
        Some(Command::Featurize { corpus }) => commands::featurize(&cfg, &corpus, out, cli.strict),
        Some(Command::Train { features }) => commands::train(&cfg, &features, out),
        Some(Command::Evaluate { model, features }) => {
            commands::evaluate(&cfg, &model, &features, out)
        }
        Some(Command::Predict { model, wav }) => commands::predict(&model, &wav),
        Some(Command::Gradcheck {
            eps,
            classes,
            samples,
            inject_fault,
        }) => commands::gradcheck(&cfg, eps, classes, samples, inject_fault),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
