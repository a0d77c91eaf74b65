//! Dataset listings.
//!
//! Two layouts are understood. A `manifest.csv` at the root with header
//! `path,label` lists image paths relative to the root with labels 0 or 1.
//! Without one, every image file under the root is taken and its label read
//! from the trailing `_0` or `_1` of the file stem, as in ALL-IDB2
//! (`Im001_1.tif`).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use qvcnn_core::encoding::{resize, Label, LabeledSample, RgbImage};
use sha2::{Digest, Sha256};

use crate::error::{io_err, Error, Result};
use crate::imageio::{is_image_path, load_rgb};

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifestMode {
    Csv,
    Filename,
    /// CSV when `manifest.csv` exists, file names otherwise.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    /// Relative to the dataset root, `/`-separated.
    pub path: String,
    pub label: Label,
    pub id: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub samples: Vec<Sample>,
    /// Hex SHA-256 of the `path,label` listing.
    pub checksum: String,
}

impl DatasetManifest {
    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    /// Decodes every image and resizes it to `size × size`.
    pub fn load_images(&self, size: usize) -> Result<Vec<LabeledSample<RgbImage>>> {
        self.samples
            .iter()
            .map(|s| {
                let path = self.root.join(&s.path);
                let img = load_rgb(&path)?;
                let image = resize(&img, size, size).map_err(|e| Error::Format {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                Ok(LabeledSample {
                    image,
                    label: s.label,
                    id: s.id.clone(),
                })
            })
            .collect()
    }
}

pub fn load_manifest(root: &Path, mode: ManifestMode) -> Result<DatasetManifest> {
    if !root.is_dir() {
        return Err(Error::MissingRoot(root.to_path_buf()));
    }
    let csv_path = root.join(MANIFEST_FILE);
    let samples = match mode {
        ManifestMode::Csv => from_csv(root, &csv_path)?,
        ManifestMode::Auto if csv_path.is_file() => from_csv(root, &csv_path)?,
        _ => from_filenames(root)?,
    };
    if samples.is_empty() {
        return Err(Error::Core(qvcnn_core::Error::EmptyDataset));
    }
    let positives = samples.iter().filter(|s| s.label.is_positive()).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::Core(qvcnn_core::Error::SingleClass));
    }
    let mut seen = BTreeSet::new();
    for s in &samples {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::Invalid(format!("duplicate sample id {}", s.id)));
        }
    }
    let mut hasher = Sha256::new();
    for s in &samples {
        hasher.update(format!("{},{}\n", s.path, s.label.index()).as_bytes());
    }
    Ok(DatasetManifest {
        root: root.to_path_buf(),
        samples,
        checksum: hex(&hasher.finalize()),
    })
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn stem_id(path: &str) -> String {
    Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn from_csv(root: &Path, csv_path: &Path) -> Result<Vec<Sample>> {
    let csv_err = |source| Error::Csv {
        path: csv_path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(csv_path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || &headers[0] != "path" || &headers[1] != "label" {
        return Err(Error::MalformedRow {
            path: csv_path.to_path_buf(),
            line: 1,
            message: "header must be `path,label`".into(),
        });
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |message: String| Error::MalformedRow {
            path: csv_path.to_path_buf(),
            line,
            message,
        };
        let path = record[0].replace('\\', "/");
        if path.is_empty() {
            return Err(malformed("empty path".into()));
        }
        let label = record[1]
            .parse::<i64>()
            .ok()
            .and_then(|v| Label::from_index(v).ok())
            .ok_or_else(|| malformed(format!("label must be 0 or 1, found `{}`", &record[1])))?;
        if !root.join(&path).is_file() {
            return Err(malformed(format!("{path} does not exist")));
        }
        samples.push(Sample {
            id: stem_id(&path),
            path,
            label,
        });
    }
    Ok(samples)
}

fn from_filenames(root: &Path) -> Result<Vec<Sample>> {
    let mut files = Vec::new();
    collect_images(root, &mut files)?;
    files.sort();
    files
        .into_iter()
        .map(|path| {
            let id = path
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            let label = match id.rsplit_once('_').map(|(_, l)| l) {
                Some("0") => Label::Healthy,
                Some("1") => Label::Lymphoblast,
                _ => return Err(Error::UnparsableFilename { path }),
            };
            let rel = path.strip_prefix(root).unwrap_or(&path);
            let rel = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            Ok(Sample {
                path: rel,
                label,
                id,
            })
        })
        .collect()
}

fn collect_images(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_dir() {
            collect_images(&path, out)?;
        } else if is_image_path(&path) {
            out.push(path);
        }
    }
    Ok(())
}
