//! Real and quaternion feature maps.
//!
//! A [`Tensor`] is a dense `(C, H, W)` array in row-major order. A
//! [`QTensor`] with `C` quaternion channels stores its four component planes
//! back to back in one real tensor of shape `(4C, H, W)`: plane `r` occupies
//! channels `r*C .. (r+1)*C`. Split activations and pooling therefore act on a
//! quaternion map exactly as on its real view, and flattening the real view
//! gives the component-major, channel, row, column ordering.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape3 {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape3 {
    pub const fn new(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
        }
    }

    pub const fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub const fn plane_len(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub const fn index(&self, c: usize, h: usize, w: usize) -> usize {
        (c * self.height + h) * self.width + w
    }
}

impl fmt::Display for Shape3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.channels, self.height, self.width)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Shape3,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(shape: Shape3) -> Self {
        Self {
            shape,
            data: vec![T::zero(); shape.len()],
        }
    }

    pub fn filled(shape: Shape3, value: T) -> Self {
        Self {
            shape,
            data: vec![value; shape.len()],
        }
    }

    pub fn from_vec(shape: Shape3, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::LengthMismatch {
                what: "tensor data",
                expected: shape.len(),
                found: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    pub fn from_fn(shape: Shape3, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(shape.len());
        for c in 0..shape.channels {
            for h in 0..shape.height {
                for w in 0..shape.width {
                    data.push(f(c, h, w));
                }
            }
        }
        Self { shape, data }
    }

    #[inline]
    pub fn shape(&self) -> Shape3 {
        self.shape
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, c: usize, h: usize, w: usize) -> T {
        self.data[self.shape.index(c, h, w)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, h: usize, w: usize, value: T) {
        let i = self.shape.index(c, h, w);
        self.data[i] = value;
    }

    pub fn channel(&self, c: usize) -> &[T] {
        let n = self.shape.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [T] {
        let n = self.shape.plane_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            shape: self.shape,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape,
            data: self.data.iter().map(|&x| U::of(x.as_f64())).collect(),
        }
    }

    pub(crate) fn expect_shape(&self, what: &'static str, expected: Shape3) -> Result<()> {
        if self.shape != expected {
            return Err(Error::ShapeMismatch {
                what,
                expected,
                found: self.shape,
            });
        }
        Ok(())
    }
}

/// Quaternion feature map with shape `(C, H, W)` in quaternion channels.
#[derive(Clone, Debug, PartialEq)]
pub struct QTensor<T> {
    real: Tensor<T>,
}

impl<T: Scalar> QTensor<T> {
    pub fn zeros(shape: Shape3) -> Self {
        Self {
            real: Tensor::zeros(Shape3::new(4 * shape.channels, shape.height, shape.width)),
        }
    }

    /// Packs four component planes; every plane must have the shape of plane 0.
    pub fn from_planes(p0: Tensor<T>, p1: Tensor<T>, p2: Tensor<T>, p3: Tensor<T>) -> Result<Self> {
        let shape = p0.shape();
        for (plane, p) in [&p1, &p2, &p3].into_iter().enumerate() {
            if p.shape() != shape {
                return Err(Error::PlaneShapeMismatch {
                    plane: plane + 1,
                    expected: shape,
                    found: p.shape(),
                });
            }
        }
        let mut data = Vec::with_capacity(4 * shape.len());
        for p in [p0, p1, p2, p3] {
            data.extend_from_slice(p.data());
        }
        Ok(Self {
            real: Tensor {
                shape: Shape3::new(4 * shape.channels, shape.height, shape.width),
                data,
            },
        })
    }

    /// Views a real tensor with `4C` channels as `C` quaternion channels.
    pub fn from_real(real: Tensor<T>) -> Result<Self> {
        if !real.shape().channels.is_multiple_of(4) {
            return Err(Error::NotQuaternionChannels(real.shape().channels));
        }
        Ok(Self { real })
    }

    /// Quaternion shape `(C, H, W)`.
    pub fn shape(&self) -> Shape3 {
        let s = self.real.shape();
        Shape3::new(s.channels / 4, s.height, s.width)
    }

    /// Component plane `r` (0 = real part, 1..=3 = i, j, k) as a `C*H*W` slice.
    pub fn plane(&self, r: usize) -> &[T] {
        let n = self.shape().len();
        &self.real.data()[r * n..(r + 1) * n]
    }

    pub fn plane_mut(&mut self, r: usize) -> &mut [T] {
        let n = self.shape().len();
        &mut self.real.data_mut()[r * n..(r + 1) * n]
    }

    /// Spatial slice of quaternion channel `c` of component `r`.
    pub fn channel(&self, r: usize, c: usize) -> &[T] {
        self.real.channel(r * self.shape().channels + c)
    }

    pub fn channel_mut(&mut self, r: usize, c: usize) -> &mut [T] {
        let channels = self.shape().channels;
        self.real.channel_mut(r * channels + c)
    }

    pub fn get(&self, c: usize, h: usize, w: usize) -> Quaternion<T> {
        let channels = self.shape().channels;
        Quaternion::from_array(core::array::from_fn(|r| {
            self.real.get(r * channels + c, h, w)
        }))
    }

    pub fn set(&mut self, c: usize, h: usize, w: usize, q: Quaternion<T>) {
        let channels = self.shape().channels;
        for (r, v) in q.to_array().into_iter().enumerate() {
            self.real.set(r * channels + c, h, w, v);
        }
    }

    pub fn into_planes(self) -> [Tensor<T>; 4] {
        let shape = self.shape();
        let n = shape.len();
        let data = self.real.into_vec();
        core::array::from_fn(|r| Tensor {
            shape,
            data: data[r * n..(r + 1) * n].to_vec(),
        })
    }

    pub fn as_real(&self) -> &Tensor<T> {
        &self.real
    }

    pub fn into_real(self) -> Tensor<T> {
        self.real
    }
}

/// Network input: a real map (concatenated color channels) or a quaternion map.
#[derive(Clone, Debug, PartialEq)]
pub enum Features<T> {
    Real(Tensor<T>),
    Quaternion(QTensor<T>),
}

impl<T: Scalar> Features<T> {
    pub fn as_real(&self) -> &Tensor<T> {
        match self {
            Features::Real(t) => t,
            Features::Quaternion(q) => q.as_real(),
        }
    }

    pub fn is_quaternion(&self) -> bool {
        matches!(self, Features::Quaternion(_))
    }

    pub fn cast<U: Scalar>(&self) -> Features<U> {
        match self {
            Features::Real(t) => Features::Real(t.cast()),
            Features::Quaternion(q) => Features::Quaternion(QTensor {
                real: q.as_real().cast(),
            }),
        }
    }
}
