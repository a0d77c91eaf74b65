use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{QTensor, Shape3, Tensor};

/// Output extent of a `window`-sized, `window`-strided pool: trailing rows or
/// columns that do not fill a window are dropped.
pub const fn pooled_len(len: usize, window: usize) -> usize {
    (len - window) / window + 1
}

pub(crate) fn pooled_shape(input: Shape3, window: usize) -> Result<Shape3> {
    if window == 0 || input.height < window || input.width < window {
        return Err(Error::SpatialTooSmall {
            what: "maxpool2d",
            height: input.height,
            width: input.width,
            window,
        });
    }
    Ok(Shape3::new(
        input.channels,
        pooled_len(input.height, window),
        pooled_len(input.width, window),
    ))
}

pub fn maxpool2d<T: Scalar>(x: &Tensor<T>, window: usize) -> Result<Tensor<T>> {
    maxpool2d_with_indices(x, window).map(|(y, _)| y)
}

/// Max pooling that also returns, per output element, the flat index of the
/// winning input element. Ties go to the first element in row-major order.
pub fn maxpool2d_with_indices<T: Scalar>(
    x: &Tensor<T>,
    window: usize,
) -> Result<(Tensor<T>, Vec<u32>)> {
    let in_shape = x.shape();
    let out_shape = pooled_shape(in_shape, window)?;
    let mut out = Tensor::zeros(out_shape);
    let mut argmax = Vec::with_capacity(out_shape.len());
    let data = x.data();
    let out_data = out.data_mut();
    let mut o = 0;
    for c in 0..out_shape.channels {
        for oy in 0..out_shape.height {
            for ox in 0..out_shape.width {
                let mut best_i = in_shape.index(c, oy * window, ox * window);
                let mut best = data[best_i];
                for dy in 0..window {
                    for dx in 0..window {
                        let i = in_shape.index(c, oy * window + dy, ox * window + dx);
                        if data[i] > best {
                            best = data[i];
                            best_i = i;
                        }
                    }
                }
                out_data[o] = best;
                argmax.push(best_i as u32);
                o += 1;
            }
        }
    }
    Ok((out, argmax))
}

/// Split max pooling: each component plane is pooled independently.
pub fn maxpool2d_quaternion<T: Scalar>(x: &QTensor<T>, window: usize) -> Result<QTensor<T>> {
    QTensor::from_real(maxpool2d(x.as_real(), window)?)
}
