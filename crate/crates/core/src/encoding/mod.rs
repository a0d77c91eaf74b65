//! Image ingestion into network inputs: color-space conversion, resizing,
//! flip augmentation, and the four input encodings (concatenated RGB,
//! concatenated HSV, RGB quaternion, HSV quaternion).

mod augment;
mod color;
mod encode;
mod image;
mod resize;

pub use augment::{augment_flips, Label, LabeledSample};
pub use color::{hsv_pixel_to_rgb, hsv_to_rgb, rgb_pixel_to_hsv, rgb_to_hsv};
pub use encode::{concat_channels, encode_hsv_quaternion, encode_rgb_quaternion, Encoding};
pub use image::{Flip, HsvImage, PixelGrid, RgbImage};
pub use resize::resize;
