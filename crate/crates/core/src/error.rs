use alloc::string::String;

use crate::tensor::Shape3;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("quaternion plane {plane} has shape {found}, expected {expected} (shape of plane 0)")]
    PlaneShapeMismatch {
        plane: usize,
        expected: Shape3,
        found: Shape3,
    },
    #[error("{what}: expected shape {expected}, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: Shape3,
        found: Shape3,
    },
    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what}: layer expects {expected} input channels, found {found}")]
    ChannelMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what}: spatial size {height}x{width} is smaller than window {window}")]
    SpatialTooSmall {
        what: &'static str,
        height: usize,
        width: usize,
        window: usize,
    },
    #[error("real tensor with {0} channels cannot be viewed as quaternion planes")]
    NotQuaternionChannels(usize),
    #[error("{what} value {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("feature kind mismatch: model expects {expected} input")]
    FeatureKind { expected: &'static str },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset contains a single class")]
    SingleClass,
    #[error("invalid label {0}, expected 0 or 1")]
    InvalidLabel(i64),
}
