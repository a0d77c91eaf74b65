use alloc::vec::Vec;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::tensor::{QTensor, Shape3, Tensor};

/// Flattens a quaternion map of `C` channels into `4·C·H·W` reals, ordered
/// component-major, then channel, row, column. Element `(r, c, h, w)` lands at
/// `((r·C + c)·H + h)·W + w`.
pub fn flatten_to_real<T: Scalar>(x: &QTensor<T>) -> Vec<T> {
    x.as_real().data().to_vec()
}

/// Inverse of [`flatten_to_real`] for a quaternion shape `(C, H, W)`.
pub fn unflatten_quaternion<T: Scalar>(v: &[T], shape: Shape3) -> Result<QTensor<T>> {
    let real = Tensor::from_vec(
        Shape3::new(4 * shape.channels, shape.height, shape.width),
        v.to_vec(),
    )?;
    QTensor::from_real(real)
}
