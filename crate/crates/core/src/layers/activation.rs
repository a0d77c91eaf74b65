use crate::scalar::Scalar;
use crate::tensor::{QTensor, Tensor};

pub fn relu<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// Split ReLU: applied to each quaternion component independently.
pub fn relu_quaternion<T: Scalar>(x: &QTensor<T>) -> QTensor<T> {
    QTensor::from_real(relu(x.as_real())).expect("channel count preserved")
}
