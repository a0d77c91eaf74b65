//! Model and checkpoint files.
//!
//! Model file, all integers and floats little-endian:
//!
//! | field        | bytes                                         |
//! |--------------|-----------------------------------------------|
//! | magic        | `QVCNNPRM`                                    |
//! | version      | u32, currently 1                              |
//! | config hash  | 32, SHA-256 of the canonical config string    |
//! | blob count   | u32                                           |
//! | blobs        | per blob: u64 element count, then f32 values  |
//!
//! Blobs follow layer declaration order, weights before biases; a
//! quaternion layer stores its four kernel banks as one blob and its four
//! bias rows as another.
//!
//! A checkpoint is a model file followed by the optimizer: magic
//! `QVCNNADM`, step count u64, learning rate, beta1, beta2 and epsilon as
//! f64, then the first-moment blobs and the second-moment blobs in the same
//! layout as the parameters.

use std::fs;
use std::io::Write;
use std::path::Path;

use qvcnn_core::layers::{Model, ModelConfig};
use qvcnn_core::train::{AdamConfig, AdamState, EpochMetrics};
use qvcnn_core::Scalar;
use sha2::{Digest, Sha256};

use crate::error::{io_err, Error, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"QVCNNPRM";
pub const ADAM_MAGIC: &[u8; 8] = b"QVCNNADM";
pub const FORMAT_VERSION: u32 = 1;

pub fn config_digest(config: &ModelConfig) -> [u8; 32] {
    Sha256::digest(config.to_string().as_bytes()).into()
}

fn put_blobs<'a, T: Scalar>(out: &mut Vec<u8>, blobs: impl ExactSizeIterator<Item = &'a [T]>) {
    out.extend_from_slice(&(blobs.len() as u32).to_le_bytes());
    for b in blobs {
        out.extend_from_slice(&(b.len() as u64).to_le_bytes());
        for &x in b {
            out.extend_from_slice(&(x.as_f64() as f32).to_le_bytes());
        }
    }
}

pub fn encode_model<T: Scalar>(model: &Model<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(48 + 4 * model.parameter_count());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&config_digest(model.config()));
    put_blobs(&mut out, model.parameters().into_iter());
    out
}

pub fn encode_checkpoint<T: Scalar>(model: &Model<T>, adam: &AdamState<T>) -> Vec<u8> {
    let mut out = encode_model(model);
    out.extend_from_slice(ADAM_MAGIC);
    out.extend_from_slice(&adam.t.to_le_bytes());
    let c = adam.config;
    for x in [c.lr, c.beta1, c.beta2, c.epsilon] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    put_blobs(&mut out, adam.m.iter().map(Vec::as_slice));
    put_blobs(&mut out, adam.v.iter().map(Vec::as_slice));
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format!("truncated at byte {}", self.pos))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> std::result::Result<[u8; N], String> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    /// Reads blobs whose lengths must equal `lens`.
    fn blobs<T: Scalar>(&mut self, lens: &[usize]) -> std::result::Result<Vec<Vec<T>>, String> {
        let count = self.u32()? as usize;
        if count != lens.len() {
            return Err(format!("expected {} blobs, found {count}", lens.len()));
        }
        lens.iter()
            .enumerate()
            .map(|(i, &want)| {
                let n = self.u64()? as usize;
                if n != want {
                    return Err(format!("blob {i} holds {n} values, expected {want}"));
                }
                let raw = self.take(4 * n)?;
                Ok(raw
                    .chunks_exact(4)
                    .map(|c| T::of(f32::from_le_bytes(c.try_into().unwrap()) as f64))
                    .collect())
            })
            .collect()
    }
}

fn decode_model_prefix<T: Scalar>(
    cur: &mut Cursor<'_>,
    config: &ModelConfig,
) -> std::result::Result<Model<T>, String> {
    if cur.take(8)? != MODEL_MAGIC {
        return Err("not a model file".into());
    }
    let version = cur.u32()?;
    if version != FORMAT_VERSION {
        return Err(format!("unsupported version {version}"));
    }
    if cur.array::<32>()? != config_digest(config) {
        return Err(format!(
            "parameters were saved for a different architecture than {config}"
        ));
    }
    let mut model = Model::zeros(config).map_err(|e| e.to_string())?;
    let lens: Vec<usize> = model.parameters().iter().map(|p| p.len()).collect();
    let blobs = cur.blobs::<T>(&lens)?;
    for (dst, src) in model.parameters_mut().into_iter().zip(blobs) {
        dst.copy_from_slice(&src);
    }
    Ok(model)
}

fn finish<T>(cur: &Cursor<'_>, value: T) -> std::result::Result<T, String> {
    if cur.pos != cur.bytes.len() {
        return Err(format!("{} trailing bytes", cur.bytes.len() - cur.pos));
    }
    Ok(value)
}

pub fn decode_model<T: Scalar>(
    bytes: &[u8],
    config: &ModelConfig,
) -> std::result::Result<Model<T>, String> {
    let mut cur = Cursor { bytes, pos: 0 };
    let model = decode_model_prefix(&mut cur, config)?;
    finish(&cur, model)
}

pub fn decode_checkpoint<T: Scalar>(
    bytes: &[u8],
    config: &ModelConfig,
) -> std::result::Result<(Model<T>, AdamState<T>), String> {
    let mut cur = Cursor { bytes, pos: 0 };
    let model = decode_model_prefix::<T>(&mut cur, config)?;
    if cur.take(8)? != ADAM_MAGIC {
        return Err("missing optimizer state".into());
    }
    let t = cur.u64()?;
    let adam = AdamConfig {
        lr: cur.f64()?,
        beta1: cur.f64()?,
        beta2: cur.f64()?,
        epsilon: cur.f64()?,
    };
    let lens: Vec<usize> = model.parameters().iter().map(|p| p.len()).collect();
    let m = cur.blobs(&lens)?;
    let v = cur.blobs(&lens)?;
    let state = AdamState {
        config: adam,
        t,
        m,
        v,
    };
    finish(&cur, (model, state))
}

fn format_err(path: &Path) -> impl FnOnce(String) -> Error + '_ {
    move |message| Error::Format {
        path: path.to_path_buf(),
        message,
    }
}

pub fn save_model<T: Scalar>(path: &Path, model: &Model<T>) -> Result<()> {
    fs::write(path, encode_model(model)).map_err(io_err(path))
}

pub fn load_model<T: Scalar>(path: &Path, config: &ModelConfig) -> Result<Model<T>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_model(&bytes, config).map_err(format_err(path))
}

pub fn save_checkpoint<T: Scalar>(
    path: &Path,
    model: &Model<T>,
    adam: &AdamState<T>,
) -> Result<()> {
    fs::write(path, encode_checkpoint(model, adam)).map_err(io_err(path))
}

pub fn load_checkpoint<T: Scalar>(
    path: &Path,
    config: &ModelConfig,
) -> Result<(Model<T>, AdamState<T>)> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_checkpoint(&bytes, config).map_err(format_err(path))
}

/// Appends epoch rows to a CSV with header `epoch,loss,train_acc`.
pub struct MetricsWriter {
    file: fs::File,
    path: std::path::PathBuf,
}

impl MetricsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut file = fs::File::create(path).map_err(io_err(path))?;
        writeln!(file, "epoch,loss,train_acc").map_err(io_err(path))?;
        Ok(Self {
            file,
            path: path.to_path_buf(),
        })
    }

    pub fn write(&mut self, m: &EpochMetrics) -> Result<()> {
        writeln!(self.file, "{},{},{}", m.epoch, m.loss, m.train_accuracy)
            .map_err(io_err(&self.path))
    }
}
