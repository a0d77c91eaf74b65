//! The repeated random-split experiment.
//!
//! Every `(config, test fraction, run)` key gets its own seed, which drives
//! the split, the weight initialization and the batch order. The training
//! side of each split is expanded with the four flip variants of each image;
//! the test side is used as is.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use qvcnn_core::encoding::{augment_flips, Encoding, LabeledSample, RgbImage};
use qvcnn_core::layers::{ModelConfig, ModelKind};
use qvcnn_core::train::{
    evaluate, train_model_with, AdamConfig, EpochMetrics, Example, TrainConfig, TrainOutcome,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::report::{emit_report, stats_from_results};
use crate::seed::derive_seed;
use crate::split::split;
use crate::stats::AggregateStats;

/// The four model/encoding pairs compared in the experiment.
#[derive(
    Clone,
    Copy,
    Debug,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigId {
    RvcnnRgb,
    RvcnnHsv,
    QvcnnRgb,
    QvcnnHsv,
}

impl ConfigId {
    pub const ALL: [ConfigId; 4] = [
        ConfigId::RvcnnRgb,
        ConfigId::RvcnnHsv,
        ConfigId::QvcnnRgb,
        ConfigId::QvcnnHsv,
    ];

    pub const fn id(self) -> &'static str {
        match self {
            ConfigId::RvcnnRgb => "rvcnn-rgb",
            ConfigId::RvcnnHsv => "rvcnn-hsv",
            ConfigId::QvcnnRgb => "qvcnn-rgb",
            ConfigId::QvcnnHsv => "qvcnn-hsv",
        }
    }

    pub const fn kind(self) -> ModelKind {
        match self {
            ConfigId::RvcnnRgb | ConfigId::RvcnnHsv => ModelKind::Real,
            ConfigId::QvcnnRgb | ConfigId::QvcnnHsv => ModelKind::Quaternion,
        }
    }

    pub const fn encoding(self) -> Encoding {
        match self {
            ConfigId::RvcnnRgb => Encoding::RgbConcat,
            ConfigId::RvcnnHsv => Encoding::HsvConcat,
            ConfigId::QvcnnRgb => Encoding::RgbQuaternion,
            ConfigId::QvcnnHsv => Encoding::HsvQuaternion,
        }
    }

    pub fn model_config(self, size: usize) -> Result<ModelConfig> {
        Ok(ModelConfig::classifier(self.kind(), self.encoding(), size)?)
    }
}

impl std::fmt::Display for ConfigId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for ConfigId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ConfigId::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown configuration `{s}`")))
    }
}

pub const DEFAULT_FRACTIONS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub configs: Vec<ConfigId>,
    pub test_fractions: Vec<f64>,
    pub runs: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub base_seed: u64,
    /// Images are resized to `image_size × image_size`.
    pub image_size: usize,
    pub stratify: bool,
    pub adam: AdamSettings,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamSettings {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl From<AdamConfig> for AdamSettings {
    fn from(c: AdamConfig) -> Self {
        Self {
            lr: c.lr,
            beta1: c.beta1,
            beta2: c.beta2,
            epsilon: c.epsilon,
        }
    }
}

impl From<AdamSettings> for AdamConfig {
    fn from(c: AdamSettings) -> Self {
        Self {
            lr: c.lr,
            beta1: c.beta1,
            beta2: c.beta2,
            epsilon: c.epsilon,
        }
    }
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            configs: ConfigId::ALL.to_vec(),
            test_fractions: DEFAULT_FRACTIONS.to_vec(),
            runs: 100,
            epochs: 100,
            batch_size: 16,
            base_seed: 0,
            image_size: 100,
            stratify: true,
            adam: AdamConfig::default().into(),
        }
    }
}

/// Identifies one run inside a plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunKey {
    pub config: ConfigId,
    pub test_fraction: f64,
    pub run: usize,
}

impl RunKey {
    fn tag(&self) -> (ConfigId, String, usize) {
        (self.config, self.test_fraction.to_string(), self.run)
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(m));
        if self.configs.is_empty() {
            return bad("the plan has no configurations".into());
        }
        if self.test_fractions.is_empty() {
            return bad("the plan has no test fractions".into());
        }
        if let Some(f) = self
            .test_fractions
            .iter()
            .find(|f| !(**f > 0.0 && **f < 1.0))
        {
            return bad(format!("test fraction {f} is outside (0, 1)"));
        }
        if self.runs == 0 {
            return bad("runs per cell must be at least 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        for c in &self.configs {
            c.model_config(self.image_size)?;
        }
        Ok(())
    }

    /// All keys, configuration-major, then fraction, then run.
    pub fn keys(&self) -> Vec<RunKey> {
        let mut keys = Vec::new();
        for &config in &self.configs {
            for &test_fraction in &self.test_fractions {
                for run in 0..self.runs {
                    keys.push(RunKey {
                        config,
                        test_fraction,
                        run,
                    });
                }
            }
        }
        keys
    }

    pub fn seed(&self, key: &RunKey) -> u64 {
        derive_seed(self.base_seed, key.config.id(), key.test_fraction, key.run)
    }

    fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed,
            adam: self.adam.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ConfigId,
    pub test_fraction: f64,
    pub run: usize,
    pub seed: u64,
    /// Training examples after flip augmentation.
    pub train_size: usize,
    pub test_size: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub wall_time_s: f64,
}

impl RunResult {
    pub fn key(&self) -> RunKey {
        RunKey {
            config: self.config,
            test_fraction: self.test_fraction,
            run: self.run,
        }
    }
}

fn encode_all(
    samples: impl IntoIterator<Item = LabeledSample<RgbImage>>,
    e: Encoding,
) -> Vec<Example<f32>> {
    samples
        .into_iter()
        .map(|s| Example {
            features: e.encode(&s.image),
            label: s.label,
        })
        .collect()
}

/// Trains and scores one split. `seed` drives the split and the training.
#[allow(clippy::too_many_arguments)]
pub fn run_single(
    config: ConfigId,
    images: &[LabeledSample<RgbImage>],
    test_fraction: f64,
    run: usize,
    seed: u64,
    plan: &ExperimentPlan,
    on_epoch: impl FnMut(&EpochMetrics),
) -> Result<(RunResult, TrainOutcome<f32>)> {
    let start = Instant::now();
    let model_config = config.model_config(plan.image_size)?;
    let labels: Vec<_> = images.iter().map(|s| s.label).collect();
    let parts = split(&labels, test_fraction, seed, plan.stratify)?;
    let encoding = config.encoding();
    let train = encode_all(
        parts.train.iter().flat_map(|&i| augment_flips(&images[i])),
        encoding,
    );
    let test = encode_all(parts.test.iter().map(|&i| images[i].clone()), encoding);
    let outcome = train_model_with(&model_config, &train, &plan.train_config(seed), on_epoch)?;
    let result = RunResult {
        config,
        test_fraction,
        run,
        seed,
        train_size: train.len(),
        test_size: test.len(),
        train_accuracy: evaluate(&outcome.model, &train)?,
        test_accuracy: evaluate(&outcome.model, &test)?,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((result, outcome))
}

/// Append-only log of finished runs inside the output directory.
pub const PARTIAL_FILE: &str = "runs.partial.csv";
pub const PLAN_FILE: &str = "plan.json";

/// What the plan file records: everything that changes a run's outcome
/// apart from its key.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct PlanRecord {
    plan: ExperimentPlan,
    data_checksum: String,
}

impl PlanRecord {
    fn compatible(&self, other: &PlanRecord) -> bool {
        let (a, b) = (&self.plan, &other.plan);
        self.data_checksum == other.data_checksum
            && a.epochs == b.epochs
            && a.batch_size == b.batch_size
            && a.base_seed == b.base_seed
            && a.image_size == b.image_size
            && a.stratify == b.stratify
            && a.adam == b.adam
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub results: Vec<RunResult>,
    pub stats: Vec<AggregateStats>,
    /// Runs executed by this call; the rest were found in the log.
    pub executed: usize,
}

/// Reads the run log, dropping a torn final line left by an interrupted write.
pub fn read_partial(path: &Path) -> Result<Vec<RunResult>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<_> = reader.deserialize::<RunResult>().collect();
    let mut out = Vec::with_capacity(rows.len());
    let last = rows.len().saturating_sub(1);
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Ok(r) => out.push(r),
            Err(_) if i == last && !text.ends_with('\n') => {}
            Err(source) => {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    source,
                })
            }
        }
    }
    Ok(out)
}

fn write_partial(path: &Path, rows: &[RunResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    }
    let mut bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    if rows.is_empty() {
        bytes = partial_header().into_bytes();
    }
    crate::report::write_atomic(path, &bytes)
}

fn partial_header() -> String {
    "config,test_fraction,run,seed,train_size,test_size,train_accuracy,test_accuracy,wall_time_s\n"
        .into()
}

fn partial_line(r: &RunResult) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
}

/// Runs every key of `plan` not already recorded in `out_dir`, then writes
/// the report files. Up to `jobs` runs execute at once; finished runs are
/// appended to the log by a single writer as they complete.
pub fn run_experiment(
    plan: &ExperimentPlan,
    images: &[LabeledSample<RgbImage>],
    data_checksum: &str,
    out_dir: &Path,
    jobs: usize,
    mut on_result: impl FnMut(&RunResult, usize, usize),
) -> Result<ExperimentReport> {
    plan.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let record = PlanRecord {
        plan: plan.clone(),
        data_checksum: data_checksum.to_string(),
    };
    let plan_path = out_dir.join(PLAN_FILE);
    let partial_path = out_dir.join(PARTIAL_FILE);
    if plan_path.exists() {
        let text = fs::read_to_string(&plan_path).map_err(io_err(&plan_path))?;
        let old: PlanRecord = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: plan_path.clone(),
            source,
        })?;
        if !old.compatible(&record) {
            return Err(Error::Invalid(format!(
                "{} holds runs of a different plan or dataset; use a fresh output directory",
                out_dir.display()
            )));
        }
    } else if partial_path.exists() {
        return Err(Error::Invalid(format!(
            "{} exists without {PLAN_FILE}; refusing to resume",
            partial_path.display()
        )));
    }
    let json = serde_json::to_vec_pretty(&record).map_err(|source| Error::Json {
        path: plan_path.clone(),
        source,
    })?;
    crate::report::write_atomic(&plan_path, &json)?;

    let mut done: HashMap<(ConfigId, String, usize), RunResult> = HashMap::new();
    let logged = read_partial(&partial_path)?;
    write_partial(&partial_path, &logged)?;
    for r in logged {
        done.insert(r.key().tag(), r);
    }

    let keys = plan.keys();
    let pending: Vec<RunKey> = keys
        .iter()
        .filter(|k| !done.contains_key(&k.tag()))
        .copied()
        .collect();
    let total = keys.len();
    let mut finished = total - pending.len();
    let executed = pending.len();

    if !pending.is_empty() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?;
        let cancel = AtomicBool::new(false);
        let (tx, rx) = mpsc::channel::<RunResult>();
        let mut log = OpenOptions::new()
            .append(true)
            .open(&partial_path)
            .map_err(io_err(&partial_path))?;
        let (worker, writer) = std::thread::scope(|s| {
            let cancel = &cancel;
            let pool = &pool;
            let pending = &pending;
            let handle = s.spawn(move || {
                pool.install(|| {
                    pending.par_iter().try_for_each_with(tx, |tx, key| {
                        if cancel.load(Ordering::Relaxed) {
                            return Ok(());
                        }
                        let seed = plan.seed(key);
                        let (result, _) = run_single(
                            key.config,
                            images,
                            key.test_fraction,
                            key.run,
                            seed,
                            plan,
                            |_| {},
                        )
                        .map_err(|e| {
                            cancel.store(true, Ordering::Relaxed);
                            Error::Run {
                                config: key.config.id().into(),
                                fraction: key.test_fraction,
                                run: key.run,
                                source: Box::new(e),
                            }
                        })?;
                        let _ = tx.send(result);
                        Ok::<(), Error>(())
                    })
                })
            });
            let mut writer: Result<()> = Ok(());
            for result in rx {
                if writer.is_ok() {
                    writer = partial_line(&result).and_then(|line| {
                        log.write_all(&line)
                            .and_then(|_| log.flush())
                            .map_err(io_err(&partial_path))
                    });
                    if writer.is_err() {
                        cancel.store(true, Ordering::Relaxed);
                    }
                }
                finished += 1;
                on_result(&result, finished, total);
                done.insert(result.key().tag(), result);
            }
            (handle.join().expect("experiment worker panicked"), writer)
        });
        worker?;
        writer?;
    }

    let results: Vec<RunResult> = keys.iter().map(|k| done[&k.tag()].clone()).collect();
    let stats = stats_from_results(&results);
    emit_report(out_dir, &results, &stats)?;
    Ok(ExperimentReport {
        results,
        stats,
        executed,
    })
}

/// Output files of a finished experiment.
pub fn report_paths(out_dir: &Path) -> [PathBuf; 4] {
    ["runs.csv", "stats.csv", "summary.json", "timings.csv"].map(|f| out_dir.join(f))
}
