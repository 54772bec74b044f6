//! Single-binary CLI for the keystream analysis pipeline.
//!
//! Exit codes: 0 success, 2 configuration error (bad flags, bad presets,
//! refused guards), 1 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsc_core::cipher::{diagonal_schedule, row_schedule, QR6_ROTATIONS};
use nsc_core::error::{Error, Result};
use nsc_core::experiments::{
    self, find_condition, load_manifest, read_features_csv, CorpusManifest, ExperimentConfig,
    Split, Task,
};
use nsc_core::neural::{Distinguisher, TrainConfig};
use nsc_core::rng::RngMode;

#[derive(Parser)]
#[command(
    name = "nsc",
    version,
    about = "Keystream generation, string-pattern features, and neural distinguishers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScaleArgs {
    /// Scale preset: desk (1,000 x 2^13 bits) or paper (50,000 x 2^16 bits)
    #[arg(long, default_value = "desk")]
    preset: String,
    /// Override: sequences per class
    #[arg(long)]
    sequences_per_class: Option<usize>,
    /// Override: bits per sequence (multiple of 8)
    #[arg(long)]
    n_bits: Option<usize>,
    /// Override: comma-separated round counts (even, >= 2)
    #[arg(long, value_delimiter = ',')]
    rounds: Option<Vec<u32>>,
    /// Global seed; every corpus, split, and training seed derives from it
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Randomness source: seeded (reproducible) or os (CSRNG)
    #[arg(long, default_value = "seeded")]
    rng: String,
    /// Feature schema version
    #[arg(long, default_value = "v1")]
    schema: String,
}

#[derive(Args, Clone)]
struct TrainArgs {
    /// Gradient-descent learning rate
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Training epochs
    #[arg(long)]
    epochs: Option<usize>,
    /// Mini-batch size
    #[arg(long)]
    batch_size: Option<usize>,
    /// L2 penalty coefficient
    #[arg(long)]
    l2: Option<f64>,
}

impl TrainArgs {
    fn apply(&self, cfg: &mut TrainConfig) {
        if let Some(v) = self.learning_rate {
            cfg.learning_rate = v;
        }
        if let Some(v) = self.epochs {
            cfg.epochs = v;
        }
        if let Some(v) = self.batch_size {
            cfg.batch_size = v;
        }
        if let Some(v) = self.l2 {
            cfg.l2 = v;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a keystream corpus plus its provenance manifest
    Generate {
        /// Run directory; all artifact paths are relative to it
        #[arg(long)]
        out: PathBuf,
        /// Task the corpus is for: distinguish, rounds, or variants
        #[arg(long, default_value = "distinguish")]
        task: String,
        #[command(flatten)]
        scale: ScaleArgs,
    },
    /// Extract feature vectors for every corpus entry
    Features {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "distinguish")]
        task: String,
        /// Feature schema version
        #[arg(long, default_value = "v1")]
        schema: String,
    },
    /// Train one distinguisher per task condition
    Train {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "distinguish")]
        task: String,
        #[arg(long, default_value = "v1")]
        schema: String,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Evaluate a trained model on one split
    Eval {
        /// Run directory (omit when giving explicit --model/--features/--manifest paths)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "distinguish")]
        task: String,
        /// Condition to evaluate (defaults to the task's first condition)
        #[arg(long)]
        condition: Option<String>,
        /// Split to evaluate: test, validation, or train
        #[arg(long, default_value = "test")]
        split: String,
        /// Permit evaluating on the training split (leakage guard)
        #[arg(long)]
        allow_train_eval: bool,
        #[arg(long, default_value = "v1")]
        schema: String,
        /// Explicit model checkpoint path
        #[arg(long)]
        model: Option<PathBuf>,
        /// Explicit feature CSV path
        #[arg(long)]
        features: Option<PathBuf>,
        /// Explicit corpus manifest path
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Re-emit the report bundle from saved models and features
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "distinguish")]
        task: String,
        #[arg(long, default_value = "v1")]
        schema: String,
    },
    /// Run generate -> features -> train -> report end to end
    Experiment {
        /// Task: distinguish, rounds, or variants
        task: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        scale: ScaleArgs,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Print the EChaCha20 state layout and round schedules
    DumpSchedule,
}

fn scale_config(task: Task, scale: &ScaleArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::preset(&scale.preset, task)?;
    if let Some(v) = scale.sequences_per_class {
        cfg.sequences_per_class = v;
    }
    if let Some(v) = scale.n_bits {
        cfg.n_bits = v;
    }
    if let Some(v) = &scale.rounds {
        cfg.rounds_list = v.clone();
    }
    cfg.seed = scale.seed;
    cfg.rng_mode = RngMode::parse(&scale.rng)?;
    cfg.schema_version = scale.schema.clone();
    cfg.validate()?;
    Ok(cfg)
}

/// Rebuilds the effective config of an existing run from its manifest, so
/// stage commands never need the generation flags repeated.
fn config_from_manifest(
    task: Task,
    manifest: &CorpusManifest,
    schema: &str,
) -> Result<ExperimentConfig> {
    let mut rounds_list = Vec::new();
    for entry in &manifest.entries {
        if let Some(r) = entry.rounds {
            if entry.generator == nsc_core::cipher::GeneratorKind::EChaCha20
                && !rounds_list.contains(&r)
            {
                rounds_list.push(r);
            }
        }
    }
    if rounds_list.is_empty() {
        rounds_list.push(20);
    }
    let sequences_per_class = manifest
        .entries
        .iter()
        .filter(|e| e.generator == nsc_core::cipher::GeneratorKind::Urandom)
        .count();
    let n_bits = manifest
        .entries
        .first()
        .map(|e| e.n_bits)
        .ok_or_else(|| Error::Config("manifest has no entries".into()))?;

    let cfg = ExperimentConfig {
        task,
        sequences_per_class,
        n_bits,
        rounds_list,
        schema_version: schema.to_string(),
        train: TrainConfig::default(),
        seed: manifest.global_seed,
        rng_mode: manifest.rng_mode,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn print_eval(result: &experiments::EvalResult) {
    println!(
        "eval {} split={}: accuracy={:.4} auc={:.4} advantage={:.4} ci=({:.4},{:.4})",
        result.condition,
        result.split.as_str(),
        result.outcome.metrics.accuracy,
        result.roc.auc,
        result.advantage.adv,
        result.advantage.confidence_interval.0,
        result.advantage.confidence_interval.1,
    );
}

fn cmd_generate(out: &Path, task: &str, scale: &ScaleArgs) -> Result<()> {
    let cfg = scale_config(Task::parse(task)?, scale)?;
    let manifest = experiments::stage_generate(&cfg, out)?;
    println!(
        "wrote corpus: {} entries -> {}",
        manifest.entries.len(),
        out.join(experiments::CORPUS_SUBDIR)
            .join(experiments::MANIFEST_FILE)
            .display()
    );
    Ok(())
}

fn cmd_features(out: &Path, task: &str, schema: &str) -> Result<()> {
    let task = Task::parse(task)?;
    let (manifest, _) = load_manifest(out)?;
    let cfg = config_from_manifest(task, &manifest, schema)?;
    let rows = experiments::stage_features(&cfg, out)?;
    let d = rows.first().map_or(0, |r| r.values.len());
    println!(
        "extracted features: d={d} rows={} -> {}",
        rows.len(),
        experiments::features_csv_path(out, task).display()
    );
    Ok(())
}

fn cmd_train(out: &Path, task: &str, schema: &str, train: &TrainArgs) -> Result<()> {
    let task = Task::parse(task)?;
    let (manifest, _) = load_manifest(out)?;
    let mut cfg = config_from_manifest(task, &manifest, schema)?;
    train.apply(&mut cfg.train);
    cfg.validate()?;
    let trained = experiments::stage_train(&cfg, out)?;
    for model in &trained {
        println!(
            "trained {}: best epoch {} val accuracy {:.4} -> {}",
            model.condition,
            model.history.best_epoch,
            model.validation_accuracy,
            model.model_path.display()
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    out: Option<&Path>,
    task: &str,
    condition: Option<&str>,
    split: &str,
    allow_train_eval: bool,
    schema: &str,
    model: Option<&Path>,
    features: Option<&Path>,
    manifest_path: Option<&Path>,
) -> Result<()> {
    let task = Task::parse(task)?;
    let split = Split::parse(split)?;
    if split == Split::Train && !allow_train_eval {
        return Err(Error::Config(
            "refusing to evaluate on the training split; pass --allow-train-eval to override"
                .into(),
        ));
    }

    match (model, features, manifest_path) {
        (Some(model), Some(features), Some(manifest_path)) => {
            let text = std::fs::read_to_string(manifest_path)
                .map_err(|e| Error::io(format!("reading {}", manifest_path.display()), e))?;
            let manifest: CorpusManifest = serde_json_from(manifest_path, &text)?;
            let cfg = config_from_manifest(task, &manifest, schema)?;
            let condition = match condition {
                Some(name) => find_condition(&cfg, name)?,
                None => experiments::task_conditions(&cfg).remove(0),
            };
            let rows = read_features_csv(features)?;
            let model = Distinguisher::load(model)?;
            let result =
                experiments::evaluate_condition(&cfg, &manifest, &rows, &condition, &model, split)?;
            print_eval(&result);
        }
        (None, None, None) => {
            let out = out.ok_or_else(|| {
                Error::Config("pass --out DIR, or all of --model/--features/--manifest".into())
            })?;
            let (manifest, _) = load_manifest(out)?;
            let cfg = config_from_manifest(task, &manifest, schema)?;
            let condition_name = match condition {
                Some(name) => name.to_string(),
                None => experiments::task_conditions(&cfg)[0].name.clone(),
            };
            let result = experiments::stage_eval(&cfg, out, &condition_name, split)?;
            print_eval(&result);
        }
        _ => {
            return Err(Error::Config(
                "--model, --features, and --manifest must be given together".into(),
            ))
        }
    }
    Ok(())
}

fn serde_json_from(path: &Path, text: &str) -> Result<CorpusManifest> {
    nsc_core::experiments::CorpusManifest::from_json(text)
        .map_err(|reason| Error::format(path, reason))
}

fn cmd_report(out: &Path, task: &str, schema: &str) -> Result<()> {
    let task = Task::parse(task)?;
    let (manifest, _) = load_manifest(out)?;
    let cfg = config_from_manifest(task, &manifest, schema)?;
    let report = experiments::stage_report(&cfg, out)?;
    for eval in &report.evals {
        print_eval(eval);
    }
    println!(
        "report: {} rows -> {}",
        report.table.rows.len(),
        experiments::reports_dir(out).display()
    );
    Ok(())
}

fn cmd_experiment(task: &str, out: &Path, scale: &ScaleArgs, train: &TrainArgs) -> Result<()> {
    let task = Task::parse(task)?;
    let mut cfg = scale_config(task, scale)?;
    train.apply(&mut cfg.train);
    cfg.validate()?;

    let manifest = experiments::stage_generate(&cfg, out)?;
    println!("generated corpus: {} entries", manifest.entries.len());
    let rows = experiments::stage_features(&cfg, out)?;
    println!("extracted features: {} rows", rows.len());
    let trained = experiments::stage_train(&cfg, out)?;
    for model in &trained {
        println!(
            "trained {}: best epoch {} val accuracy {:.4}",
            model.condition, model.history.best_epoch, model.validation_accuracy
        );
    }
    let report = experiments::stage_report(&cfg, out)?;
    for eval in &report.evals {
        print_eval(eval);
    }
    println!(
        "report bundle -> {}",
        experiments::reports_dir(out).display()
    );
    Ok(())
}

fn cmd_dump_schedule() {
    println!("state layout: 4 rows x 6 columns, word index = 6*row + column");
    println!("  words  0..5  constants C0..C5");
    println!("  words  6..13 key");
    println!("  words 14..17 nonce");
    println!("  words 18..19 block counter (low, high)");
    println!("  words 20..23 constants C6..C9");
    println!("row round:");
    for (i, row) in row_schedule().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|w| w.to_string()).collect();
        println!("  row {i}: {}", cells.join(" "));
    }
    println!("diagonal round:");
    for (i, diag) in diagonal_schedule().iter().enumerate() {
        let cells: Vec<String> = diag.iter().map(|w| w.to_string()).collect();
        println!("  diag {i}: {}", cells.join(" "));
    }
    let rotations: Vec<String> = QR6_ROTATIONS.iter().map(|r| r.to_string()).collect();
    println!("rotation schedule: {}", rotations.join(" "));
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Generate { out, task, scale } => cmd_generate(out, task, scale),
        Command::Features { out, task, schema } => cmd_features(out, task, schema),
        Command::Train {
            out,
            task,
            schema,
            train,
        } => cmd_train(out, task, schema, train),
        Command::Eval {
            out,
            task,
            condition,
            split,
            allow_train_eval,
            schema,
            model,
            features,
            manifest,
        } => cmd_eval(
            out.as_deref(),
            task,
            condition.as_deref(),
            split,
            *allow_train_eval,
            schema,
            model.as_deref(),
            features.as_deref(),
            manifest.as_deref(),
        ),
        Command::Report { out, task, schema } => cmd_report(out, task, schema),
        Command::Experiment {
            task,
            out,
            scale,
            train,
        } => cmd_experiment(task, out, scale, train),
        Command::DumpSchedule => {
            cmd_dump_schedule();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
