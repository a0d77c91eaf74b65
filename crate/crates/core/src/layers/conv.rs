use alloc::vec;
use alloc::vec::Vec;

use super::kernels::correlate_acc;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{Shape3, Tensor};

/// Real convolution parameters: kernel bank `(F, C, k, k)` and `F` biases.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvParams<T> {
    filters: usize,
    channels: usize,
    kernel: usize,
    pub(crate) weight: Vec<T>,
    pub(crate) bias: Vec<T>,
}

impl<T: Scalar> ConvParams<T> {
    pub fn zeros(filters: usize, channels: usize, kernel: usize) -> Self {
        Self {
            filters,
            channels,
            kernel,
            weight: vec![T::zero(); filters * channels * kernel * kernel],
            bias: vec![T::zero(); filters],
        }
    }

    pub fn from_parts(
        filters: usize,
        channels: usize,
        kernel: usize,
        weight: Vec<T>,
        bias: Vec<T>,
    ) -> Result<Self> {
        let expected = filters * channels * kernel * kernel;
        if weight.len() != expected {
            return Err(Error::LengthMismatch {
                what: "conv weight",
                expected,
                found: weight.len(),
            });
        }
        if bias.len() != filters {
            return Err(Error::LengthMismatch {
                what: "conv bias",
                expected: filters,
                found: bias.len(),
            });
        }
        Ok(Self {
            filters,
            channels,
            kernel,
            weight,
            bias,
        })
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

    pub fn weight(&self) -> &[T] {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut [T] {
        &mut self.weight
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [T] {
        &mut self.bias
    }

    /// Kernel `(dy, dx)` slice for filter `f`, input channel `c`.
    pub fn tap_kernel(&self, f: usize, c: usize) -> &[T] {
        let kk = self.kernel * self.kernel;
        &self.weight[(f * self.channels + c) * kk..][..kk]
    }

    pub fn parameter_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    pub fn output_shape(&self, input: Shape3) -> Result<Shape3> {
        valid_output_shape("conv2d", input, self.channels, self.filters, self.kernel)
    }
}

pub(crate) fn valid_output_shape(
    what: &'static str,
    input: Shape3,
    channels: usize,
    filters: usize,
    kernel: usize,
) -> Result<Shape3> {
    if input.channels != channels {
        return Err(Error::ChannelMismatch {
            what,
            expected: channels,
            found: input.channels,
        });
    }
    if kernel == 0 || input.height < kernel || input.width < kernel {
        return Err(Error::SpatialTooSmall {
            what,
            height: input.height,
            width: input.width,
            window: kernel,
        });
    }
    Ok(Shape3::new(
        filters,
        input.height - kernel + 1,
        input.width - kernel + 1,
    ))
}

/// Valid, stride-1 cross-correlation plus bias.
pub fn conv2d_forward<T: Scalar>(x: &Tensor<T>, params: &ConvParams<T>) -> Result<Tensor<T>> {
    let in_shape = x.shape();
    let out_shape = params.output_shape(in_shape)?;
    let mut out = Tensor::zeros(out_shape);
    for f in 0..params.filters {
        let plane = out.channel_mut(f);
        plane.fill(params.bias[f]);
        for c in 0..params.channels {
            correlate_acc(
                plane,
                x.channel(c),
                in_shape.width,
                params.tap_kernel(f, c),
                params.kernel,
                T::one(),
            );
        }
    }
    Ok(out)
}
