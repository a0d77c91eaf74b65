//! Std companion to `qvcnn-core`: image decoding, dataset manifests, model
//! files, the repeated-split experiment and its reports.

pub mod error;
pub mod experiment;
pub mod imageio;
pub mod manifest;
pub mod params_io;
pub mod report;
pub mod seed;
pub mod split;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use experiment::{
    run_experiment, run_single, ConfigId, ExperimentPlan, ExperimentReport, RunResult,
};
pub use manifest::{load_manifest, DatasetManifest, ManifestMode};
pub use stats::AggregateStats;
