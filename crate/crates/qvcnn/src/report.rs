//! Report files of an experiment.
//!
//! * `runs.csv`: `config,test_fraction,run,seed,train_size,test_size,train_accuracy,test_accuracy`,
//!   one row per run.
//! * `stats.csv`: `config,test_fraction,runs,mean,std,q25,q75` of test
//!   accuracy, one row per configuration and fraction.
//! * `summary.json`: `{"stats": [...]}` with the rows of `stats.csv`.
//! * `timings.csv`: `config,test_fraction,run,wall_time_s`.
//!
//! Wall times live only in `timings.csv` so that the other files depend on
//! the plan and data alone.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Error, Result};
use crate::experiment::{ConfigId, RunResult};
use crate::stats::{aggregate, AggregateStats};

#[derive(Debug, Serialize, Deserialize)]
struct RunRow {
    config: ConfigId,
    test_fraction: f64,
    run: usize,
    seed: u64,
    train_size: usize,
    test_size: usize,
    train_accuracy: f64,
    test_accuracy: f64,
}

#[derive(Serialize)]
struct TimingRow {
    config: ConfigId,
    test_fraction: f64,
    run: usize,
    wall_time_s: f64,
}

#[derive(Serialize, Deserialize)]
struct Summary {
    stats: Vec<AggregateStats>,
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn to_csv<S: Serialize>(path: &Path, rows: impl IntoIterator<Item = S>) -> Result<Vec<u8>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
}

/// Statistics of test accuracy per `(config, fraction)`, in order of first
/// appearance.
pub fn stats_from_results(results: &[RunResult]) -> Vec<AggregateStats> {
    let mut groups: Vec<((ConfigId, f64), Vec<f64>)> = Vec::new();
    for r in results {
        match groups
            .iter_mut()
            .find(|((c, f), _)| *c == r.config && f.to_bits() == r.test_fraction.to_bits())
        {
            Some((_, xs)) => xs.push(r.test_accuracy),
            None => groups.push(((r.config, r.test_fraction), vec![r.test_accuracy])),
        }
    }
    groups
        .into_iter()
        .filter_map(|((c, f), xs)| aggregate(c.id(), f, &xs))
        .collect()
}

pub fn emit_report(out_dir: &Path, results: &[RunResult], stats: &[AggregateStats]) -> Result<()> {
    if results.is_empty() {
        return Err(Error::Invalid("no run results to report".into()));
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let runs = out_dir.join("runs.csv");
    let rows = results.iter().map(|r| RunRow {
        config: r.config,
        test_fraction: r.test_fraction,
        run: r.run,
        seed: r.seed,
        train_size: r.train_size,
        test_size: r.test_size,
        train_accuracy: r.train_accuracy,
        test_accuracy: r.test_accuracy,
    });
    write_atomic(&runs, &to_csv(&runs, rows)?)?;

    let timings = out_dir.join("timings.csv");
    let rows = results.iter().map(|r| TimingRow {
        config: r.config,
        test_fraction: r.test_fraction,
        run: r.run,
        wall_time_s: r.wall_time_s,
    });
    write_atomic(&timings, &to_csv(&timings, rows)?)?;

    let stats_path = out_dir.join("stats.csv");
    write_atomic(&stats_path, &to_csv(&stats_path, stats)?)?;

    let summary = out_dir.join("summary.json");
    let mut json = serde_json::to_vec_pretty(&Summary {
        stats: stats.to_vec(),
    })
    .map_err(|source| Error::Json {
        path: summary.clone(),
        source,
    })?;
    json.push(b'\n');
    write_atomic(&summary, &json)
}

/// Reads `runs.csv` back; wall times come back as zero.
pub fn read_runs(path: &Path) -> Result<Vec<RunResult>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader
        .deserialize::<RunRow>()
        .map(|row| {
            let r = row.map_err(csv_err)?;
            Ok(RunResult {
                config: r.config,
                test_fraction: r.test_fraction,
                run: r.run,
                seed: r.seed,
                train_size: r.train_size,
                test_size: r.test_size,
                train_accuracy: r.train_accuracy,
                test_accuracy: r.test_accuracy,
                wall_time_s: 0.0,
            })
        })
        .collect()
}

pub fn read_stats(path: &Path) -> Result<Vec<AggregateStats>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.deserialize().map(|r| r.map_err(csv_err)).collect()
}
