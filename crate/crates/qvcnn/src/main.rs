use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qvcnn::experiment::{
    report_paths, run_experiment, run_single, ConfigId, ExperimentPlan, DEFAULT_FRACTIONS,
};
use qvcnn::manifest::{load_manifest, ManifestMode};
use qvcnn::params_io::{save_checkpoint, save_model, MetricsWriter};
use qvcnn::synth::{synth_samples, write_dataset, SynthTask};
use qvcnn_core::encoding::Encoding;
use qvcnn_core::layers::{count_parameters, ModelConfig, ModelKind};
use qvcnn_core::train::gradcheck::run_suite;

/// Quaternion- and real-valued CNNs for binary white-blood-cell classification.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate one model on one random split.
    Train(TrainArgs),
    /// Repeat training over configurations, test fractions and seeds.
    Sweep(SweepArgs),
    /// Print the per-layer parameter counts of both architectures.
    CountParams {
        /// Input height and width.
        #[arg(long, default_value_t = 100)]
        size: usize,
    },
    /// Compare analytic gradients with central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random configurations per layer kind.
        #[arg(long, default_value_t = 3)]
        configs: usize,
        #[arg(long, default_value_t = 1e-6)]
        step: f64,
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Write a synthetic labeled image set as PPM files.
    SynthData {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        size: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = SynthTask::Stain)]
        task: SynthTask,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ManifestArg {
    Auto,
    Csv,
    Filename,
}

impl From<ManifestArg> for ManifestMode {
    fn from(m: ManifestArg) -> Self {
        match m {
            ManifestArg::Auto => ManifestMode::Auto,
            ManifestArg::Csv => ManifestMode::Csv,
            ManifestArg::Filename => ManifestMode::Filename,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// Dataset root; images labeled by `manifest.csv` or by a trailing `_0`/`_1` in the file name.
    #[arg(long, env = "QVCNN_DATA")]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = ManifestArg::Auto)]
    manifest: ManifestArg,
    /// Images are resized to SIZE x SIZE.
    #[arg(long, default_value_t = 100)]
    size: usize,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    /// Split without preserving class proportions.
    #[arg(long)]
    no_stratify: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    config: ConfigId,
    #[arg(long, default_value_t = 0.1)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated; defaults to all four.
    #[arg(long, value_enum, value_delimiter = ',')]
    configs: Vec<ConfigId>,
    /// Comma-separated test fractions.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FRACTIONS)]
    fractions: Vec<f64>,
    /// Runs per configuration and fraction.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Base seed from which every run's seed is derived.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent runs; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    data: DataArgs,
}

impl DataArgs {
    fn plan(&self) -> ExperimentPlan {
        ExperimentPlan {
            epochs: self.epochs,
            batch_size: self.batch_size,
            image_size: self.size,
            stratify: !self.no_stratify,
            ..ExperimentPlan::default()
        }
    }
}

fn count_params(size: usize) -> Result<()> {
    let mut totals = Vec::new();
    for (kind, encoding) in [
        (ModelKind::Real, Encoding::RgbConcat),
        (ModelKind::Quaternion, Encoding::RgbQuaternion),
    ] {
        let config = ModelConfig::classifier(kind, encoding, size)?;
        let ledger = count_parameters(&config)?;
        println!("{} ({size}x{size} input)", kind.id().to_uppercase());
        for l in &ledger.layers {
            println!("  {:<8}{:>8}", l.label, l.count);
        }
        println!("  {:<8}{:>8}", "total", ledger.total);
        totals.push(ledger.total);
    }
    println!(
        "QVCNN/RVCNN parameter ratio: {:.1}%",
        100.0 * totals[1] as f64 / totals[0] as f64
    );
    Ok(())
}

fn gradcheck(seed: u64, configs: usize, step: f64, tolerance: f64) -> Result<bool> {
    let mut ok = true;
    for entry in run_suite(seed, configs, step)? {
        let pass = entry.report.max_rel_error < tolerance;
        ok &= pass;
        println!(
            "{:<12} max rel error {:.3e}  checked {:>4}  skipped {:>3}  {}",
            entry.name,
            entry.report.max_rel_error,
            entry.report.checked,
            entry.report.skipped,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(ok)
}

fn train(args: &TrainArgs) -> Result<()> {
    let d = &args.data;
    let manifest = load_manifest(&d.data, d.manifest.into())?;
    let images = manifest.load_images(d.size)?;
    std::fs::create_dir_all(&d.out).with_context(|| format!("creating {}", d.out.display()))?;
    let plan = d.plan();
    let mut metrics = MetricsWriter::create(&d.out.join("metrics.csv"))?;
    let mut write_err = None;
    let (result, outcome) = run_single(
        args.config,
        &images,
        args.test_fraction,
        0,
        args.seed,
        &plan,
        |m| {
            eprintln!(
                "epoch {:>3}  loss {:.4}  train acc {:.4}",
                m.epoch, m.loss, m.train_accuracy
            );
            if let Err(e) = metrics.write(m) {
                write_err.get_or_insert(e);
            }
        },
    )?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    save_model(&d.out.join("model.qvp"), &outcome.model)?;
    save_checkpoint(
        &d.out.join("checkpoint.qvc"),
        &outcome.model,
        &outcome.optimizer,
    )?;
    let json = serde_json::to_string_pretty(&result)?;
    std::fs::write(d.out.join("result.json"), format!("{json}\n"))?;
    println!("{json}");
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let d = &args.data;
    let mut plan = d.plan();
    if !args.configs.is_empty() {
        plan.configs = args.configs.clone();
    }
    plan.test_fractions = args.fractions.clone();
    plan.runs = args.runs;
    plan.base_seed = args.seed;
    plan.validate()?;
    let manifest = load_manifest(&d.data, d.manifest.into())?;
    eprintln!(
        "{} images ({} lymphoblast), listing sha256 {}",
        manifest.samples.len(),
        manifest.count(qvcnn_core::encoding::Label::Lymphoblast),
        manifest.checksum
    );
    let images = manifest.load_images(d.size)?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = run_experiment(
        &plan,
        &images,
        &manifest.checksum,
        &d.out,
        jobs,
        |r, done, total| {
            eprintln!(
                "[{done}/{total}] {} test {} run {}: test acc {:.4}  ({:.1}s)",
                r.config, r.test_fraction, r.run, r.test_accuracy, r.wall_time_s
            );
        },
    )?;
    println!("config,test_fraction,runs,mean,std,q25,q75");
    for s in &report.stats {
        println!(
            "{},{},{},{:.4},{:.4},{:.4},{:.4}",
            s.config, s.test_fraction, s.runs, s.mean, s.std, s.q25, s.q75
        );
    }
    for p in report_paths(&d.out) {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Train(args) => train(&args)?,
        Command::Sweep(args) => sweep(&args)?,
        Command::CountParams { size } => count_params(size)?,
        Command::Gradcheck {
            seed,
            configs,
            step,
            tolerance,
        } => return gradcheck(seed, configs, step, tolerance),
        Command::SynthData {
            n,
            size,
            out,
            task,
            seed,
        } => {
            if n < 2 {
                bail!("need at least two images, one per class");
            }
            let samples = synth_samples(task, n, size, seed);
            let paths = write_dataset(&out, &samples)?;
            println!("wrote {} images to {}", paths.len(), out.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
