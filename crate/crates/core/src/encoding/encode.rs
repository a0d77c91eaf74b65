use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use num_traits::Float;

use super::color::rgb_to_hsv;
use super::image::{HsvImage, PixelGrid, RgbImage};
use crate::error::Error;
use crate::scalar::Scalar;
use crate::tensor::{Features, QTensor, Shape3, Tensor};

/// How an RGB image becomes a network input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// R, G, B stacked as three real channels.
    RgbConcat,
    /// H (radians), S, V stacked as three real channels.
    HsvConcat,
    /// `0 + R i + G j + B k`.
    RgbQuaternion,
    /// `S cos H + S sin H i + V cos H j + V sin H k`.
    HsvQuaternion,
}

impl Encoding {
    pub const ALL: [Encoding; 4] = [
        Encoding::RgbConcat,
        Encoding::HsvConcat,
        Encoding::RgbQuaternion,
        Encoding::HsvQuaternion,
    ];

    pub const fn id(self) -> &'static str {
        match self {
            Encoding::RgbConcat => "rgb-concat",
            Encoding::HsvConcat => "hsv-concat",
            Encoding::RgbQuaternion => "rgb-quaternion",
            Encoding::HsvQuaternion => "hsv-quaternion",
        }
    }

    pub const fn is_quaternion(self) -> bool {
        matches!(self, Encoding::RgbQuaternion | Encoding::HsvQuaternion)
    }

    pub const fn is_hsv(self) -> bool {
        matches!(self, Encoding::HsvConcat | Encoding::HsvQuaternion)
    }

    /// Input channels: 3 real channels or 1 quaternion channel.
    pub const fn channels(self) -> usize {
        if self.is_quaternion() {
            1
        } else {
            3
        }
    }

    pub fn encode<T: Scalar>(self, img: &RgbImage) -> Features<T> {
        match self {
            Encoding::RgbConcat => Features::Real(concat_channels(img)),
            Encoding::HsvConcat => Features::Real(concat_channels(&rgb_to_hsv(img))),
            Encoding::RgbQuaternion => Features::Quaternion(encode_rgb_quaternion(img)),
            Encoding::HsvQuaternion => {
                Features::Quaternion(encode_hsv_quaternion(&rgb_to_hsv(img)))
            }
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown encoding {s:?}")))
    }
}

fn planes_from<T: Scalar, I: PixelGrid>(img: &I, f: impl Fn([f64; 3]) -> [f64; 4]) -> QTensor<T> {
    let shape = Shape3::new(1, img.height(), img.width());
    let n = shape.len();
    let mut out = QTensor::zeros(shape);
    for (i, &p) in img.pixels().iter().enumerate() {
        for (r, v) in f(p).into_iter().enumerate() {
            out.plane_mut(r)[i] = T::of(v);
        }
    }
    debug_assert_eq!(out.plane(0).len(), n);
    out
}

/// One quaternion channel with a null real part and R, G, B on i, j, k.
pub fn encode_rgb_quaternion<T: Scalar>(img: &RgbImage) -> QTensor<T> {
    planes_from(img, |[r, g, b]| [0.0, r, g, b])
}

/// One quaternion channel `(S cos H, S sin H, V cos H, V sin H)`.
pub fn encode_hsv_quaternion<T: Scalar>(img: &HsvImage) -> QTensor<T> {
    planes_from(img, |[h, s, v]| {
        let (sin, cos) = Float::sin_cos(h);
        [s * cos, s * sin, v * cos, v * sin]
    })
}

/// Channel-major `(3, H, W)` stacking without rescaling.
pub fn concat_channels<T: Scalar, I: PixelGrid>(img: &I) -> Tensor<T> {
    let shape = Shape3::new(3, img.height(), img.width());
    let n = shape.plane_len();
    let mut data = Vec::with_capacity(shape.len());
    for ch in 0..3 {
        data.extend(img.pixels().iter().map(|p| T::of(p[ch])));
    }
    debug_assert_eq!(data.len(), 3 * n);
    Tensor::from_vec(shape, data).expect("length matches shape")
}
