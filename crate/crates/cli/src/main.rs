use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use claimscope::pipeline::{
    cmd_eda, cmd_evaluate, cmd_sweep, cmd_synth, cmd_train, run_pipeline, ModelKind,
    PipelineConfig, PipelineError,
};

/// Claims fraud detection: synthetic data, EDA, supervised and reconstruction-error models.
#[derive(Parser)]
#[command(name = "claimscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus (four CSV tables) into --out.
    Synth,
    /// Write eda.json and join_report.json.
    Eda,
    /// Train the chosen model and write model.json.
    Train,
    /// Evaluate model.json from --out on the test split; writes report.json and roc.csv.
    Evaluate,
    /// Threshold sweep of model.json from --out; writes sweep.csv.
    Sweep,
    /// End to end: every artifact.
    Run,
}

/// Flags take precedence over the config file.
#[derive(Args)]
struct Overrides {
    /// JSON pipeline config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// logreg | forest | pca-recon | autoencoder
    #[arg(long, global = true)]
    model: Option<ModelKind>,
    /// Seed for the split and every model (the generator seed for `synth`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Calibration percentile for reconstruction models.
    #[arg(long, global = true)]
    percentile: Option<f64>,
    /// Probability threshold for supervised models.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn config(command: &Command, o: &Overrides) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &o.config {
        Some(path) => PipelineConfig::from_json_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(m) = o.model {
        cfg.model = m;
    }
    if let Some(seed) = o.seed {
        if matches!(command, Command::Synth) {
            cfg.data.synth.get_or_insert_with(Default::default).seed = seed;
        } else {
            cfg.set_seed(seed);
        }
    }
    if let Some(p) = o.percentile {
        cfg.percentile = p;
    }
    if let Some(t) = o.threshold {
        cfg.threshold = t;
    }
    if let Some(out) = &o.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    let cfg = config(&cli.command, &cli.overrides)?;
    let written = match cli.command {
        Command::Synth => cmd_synth(&cfg)?,
        Command::Eda => cmd_eda(&cfg)?,
        Command::Train => cmd_train(&cfg)?,
        Command::Evaluate => cmd_evaluate(&cfg)?,
        Command::Sweep => cmd_sweep(&cfg)?,
        Command::Run => {
            let (report, written) = run_pipeline(&cfg)?;
            let e = &report.evaluation;
            println!(
                "{} ({:?} level): auc {:.4}  accuracy {:.4}  precision {:.4}  recall {:.4}  f1 {:.4}  kappa {:.4}  threshold {:.6}",
                report.model.as_str(),
                report.unit,
                e.auc,
                e.accuracy,
                e.precision,
                e.recall,
                e.f1,
                e.kappa,
                e.threshold
            );
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            written
        }
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
