//! Quaternion-valued convolutional network primitives.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that is pure
//! computation: quaternion algebra, real and quaternion feature maps, the
//! forward and reverse passes of every layer used by the real-valued and
//! quaternion-valued classifiers, Adam, Glorot initialization, and the color
//! encodings used to feed images into either network.
//!
//! File formats, dataset ingestion and the experiment harness live in the
//! companion `qvcnn` crate.

#![no_std]

extern crate alloc;

pub mod encoding;
pub mod error;
pub mod layers;
pub mod quat;
pub mod scalar;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use quat::Quaternion;
pub use scalar::Scalar;
pub use tensor::{Features, QTensor, Shape3, Tensor};
