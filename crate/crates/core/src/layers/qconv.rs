use alloc::vec;
use alloc::vec::Vec;

use super::conv::valid_output_shape;
use super::kernels::correlate_acc;
use crate::error::{Error, Result};
use crate::quat::{Quaternion, HAMILTON_TABLE};
use crate::scalar::Scalar;
use crate::tensor::{QTensor, Shape3};

/// Quaternion convolution parameters.
///
/// The filter `W = W0 + W1 i + W2 j + W3 k` is held as four real kernel banks
/// of shape `(F, C, k, k)`, stored component-major in one buffer. Biases are
/// `F` quaternions stored as four component rows of length `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct QConvParams<T> {
    filters: usize,
    channels: usize,
    kernel: usize,
    pub(crate) weight: Vec<T>,
    pub(crate) bias: Vec<T>,
}

impl<T: Scalar> QConvParams<T> {
    pub fn zeros(filters: usize, channels: usize, kernel: usize) -> Self {
        Self {
            filters,
            channels,
            kernel,
            weight: vec![T::zero(); 4 * filters * channels * kernel * kernel],
            bias: vec![T::zero(); 4 * filters],
        }
    }

    pub fn from_banks(banks: [Vec<T>; 4], bias: Vec<Quaternion<T>>, kernel: usize) -> Result<Self> {
        let filters = bias.len();
        let kk = kernel * kernel;
        let bank_len = banks[0].len();
        if filters == 0 || kk == 0 || !bank_len.is_multiple_of(filters * kk) {
            return Err(Error::LengthMismatch {
                what: "quaternion kernel bank",
                expected: filters * kk,
                found: bank_len,
            });
        }
        for b in &banks[1..] {
            if b.len() != bank_len {
                return Err(Error::LengthMismatch {
                    what: "quaternion kernel bank",
                    expected: bank_len,
                    found: b.len(),
                });
            }
        }
        let channels = bank_len / (filters * kk);
        let mut p = Self::zeros(filters, channels, kernel);
        for (r, b) in banks.iter().enumerate() {
            p.bank_mut(r).copy_from_slice(b);
        }
        for (f, q) in bias.into_iter().enumerate() {
            p.set_bias(f, q);
        }
        Ok(p)
    }

    pub fn filters(&self) -> usize {
        self.filters
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn kernel(&self) -> usize {
        self.kernel
    }

    fn bank_len(&self) -> usize {
        self.filters * self.channels * self.kernel * self.kernel
    }

    /// Real kernel bank `W_r` with shape `(F, C, k, k)`.
    pub fn bank(&self, r: usize) -> &[T] {
        let n = self.bank_len();
        &self.weight[r * n..(r + 1) * n]
    }

    pub fn bank_mut(&mut self, r: usize) -> &mut [T] {
        let n = self.bank_len();
        &mut self.weight[r * n..(r + 1) * n]
    }

    pub(crate) fn tap_kernel(&self, r: usize, f: usize, c: usize) -> &[T] {
        let kk = self.kernel * self.kernel;
        &self.bank(r)[(f * self.channels + c) * kk..][..kk]
    }

    /// Filter tap as a quaternion.
    pub fn tap(&self, f: usize, c: usize, dy: usize, dx: usize) -> Quaternion<T> {
        let i = dy * self.kernel + dx;
        Quaternion::from_array(core::array::from_fn(|r| self.tap_kernel(r, f, c)[i]))
    }

    pub fn set_tap(&mut self, f: usize, c: usize, dy: usize, dx: usize, q: Quaternion<T>) {
        let kk = self.kernel * self.kernel;
        let i = (f * self.channels + c) * kk + dy * self.kernel + dx;
        for (r, v) in q.to_array().into_iter().enumerate() {
            self.bank_mut(r)[i] = v;
        }
    }

    pub fn bias(&self, f: usize) -> Quaternion<T> {
        Quaternion::from_array(core::array::from_fn(|r| self.bias[r * self.filters + f]))
    }

    pub fn set_bias(&mut self, f: usize, q: Quaternion<T>) {
        for (r, v) in q.to_array().into_iter().enumerate() {
            self.bias[r * self.filters + f] = v;
        }
    }

    pub fn weight(&self) -> &[T] {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut [T] {
        &mut self.weight
    }

    /// Bias components, laid out as four rows of length `F`.
    pub fn bias_components(&self) -> &[T] {
        &self.bias
    }

    pub fn bias_components_mut(&mut self) -> &mut [T] {
        &mut self.bias
    }

    /// `4·F·C·k² + 4·F` real parameters.
    pub fn parameter_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    /// Output shape in quaternion channels.
    pub fn output_shape(&self, input: Shape3) -> Result<Shape3> {
        valid_output_shape("qconv2d", input, self.channels, self.filters, self.kernel)
    }
}

/// Quaternion valid cross-correlation: every output quaternion is the sum over
/// its receptive field of `W_tap ⊗ x_tap`, plus the quaternion bias.
///
/// Component-wise this is the real block form
///
/// ```text
/// out0 = W0*x0 − W1*x1 − W2*x2 − W3*x3
/// out1 = W0*x1 + W1*x0 + W2*x3 − W3*x2
/// out2 = W0*x2 − W1*x3 + W2*x0 + W3*x1
/// out3 = W0*x3 + W1*x2 − W2*x1 + W3*x0
/// ```
pub fn qconv2d_forward<T: Scalar>(x: &QTensor<T>, params: &QConvParams<T>) -> Result<QTensor<T>> {
    let in_shape = x.shape();
    let out_shape = params.output_shape(in_shape)?;
    let mut out = QTensor::zeros(out_shape);
    for f in 0..params.filters {
        let bias = params.bias(f).to_array();
        for (r, b) in bias.into_iter().enumerate() {
            out.channel_mut(r, f).fill(b);
        }
        for (a, row) in HAMILTON_TABLE.iter().enumerate() {
            for (s, &(r, sign)) in row.iter().enumerate() {
                let sign = T::of(sign as f64);
                for c in 0..params.channels {
                    correlate_acc(
                        out.channel_mut(r, f),
                        x.channel(s, c),
                        in_shape.width,
                        params.tap_kernel(a, f, c),
                        params.kernel,
                        sign,
                    );
                }
            }
        }
    }
    Ok(out)
}
