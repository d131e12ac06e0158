use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trotter_stats::experiments::{self, column_docs, ExperimentConfig, ExperimentKind};
use trotter_stats::Error;

/// Statistical Trotter error experiments.
#[derive(Parser, Debug)]
#[command(name = "trotter-stats", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local-unitary variance of the one-step error along a state trajectory.
    #[command(after_help = column_docs(ExperimentKind::VarianceVsTime))]
    VarianceVsTime(RunArgs),
    /// Global Clifford kurtosis of the error against magic.
    #[command(after_help = column_docs(ExperimentKind::KurtosisVsMagic))]
    KurtosisVsMagic(RunArgs),
    /// Local Clifford error distributions for three reference states.
    #[command(after_help = column_docs(ExperimentKind::JointLc))]
    JointLc(RunArgs),
    /// Entanglement and magic of the evolved state over time.
    #[command(after_help = column_docs(ExperimentKind::ResourceGrowth))]
    ResourceGrowth(RunArgs),
    /// Local-unitary variance of the multi-step error.
    #[command(after_help = column_docs(ExperimentKind::LongTime))]
    LongTime(RunArgs),
    /// Print the built-in downscaled config for an experiment as TOML.
    ExampleConfig {
        #[arg(value_parser = parse_kind)]
        experiment: ExperimentKind,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML or JSON config; the built-in downscaled preset when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the config, defaults to `results`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Replace the ensemble sample count.
    #[arg(long)]
    samples_override: Option<usize>,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    ExperimentKind::ALL
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| {
            let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            format!("expected one of {}", names.join(", "))
        })
}

fn load(kind: ExperimentKind, args: &RunArgs) -> trotter_stats::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::preset(kind),
    };
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config is for {}, not {}",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(s) = args.samples_override {
        cfg.samples = s;
    }
    if let Some(dir) = &args.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> trotter_stats::Result<()> {
    let cfg = load(kind, args)?;
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(Error::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let result = experiments::run(&cfg)?;
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("results"));
    let files = result.write(&dir)?;
    eprintln!(
        "{}: {} rows in {:.1}s -> {}",
        kind.name(),
        result.rows.len(),
        result.wall_clock_seconds,
        files.csv.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::VarianceVsTime(a) => (ExperimentKind::VarianceVsTime, a),
        Command::KurtosisVsMagic(a) => (ExperimentKind::KurtosisVsMagic, a),
        Command::JointLc(a) => (ExperimentKind::JointLc, a),
        Command::ResourceGrowth(a) => (ExperimentKind::ResourceGrowth, a),
        Command::LongTime(a) => (ExperimentKind::LongTime, a),
        Command::ExampleConfig { experiment } => {
            return match ExperimentConfig::preset(experiment).to_toml() {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            };
        }
    };
    match execute(kind, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else if e.is_numeric_limit() {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
