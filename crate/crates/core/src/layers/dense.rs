use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Single-output dense layer: `D` weights and one bias.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseParams<T> {
    pub(crate) weight: Vec<T>,
    pub(crate) bias: T,
}

impl<T: Scalar> DenseParams<T> {
    pub fn zeros(inputs: usize) -> Self {
        Self {
            weight: vec![T::zero(); inputs],
            bias: T::zero(),
        }
    }

    pub fn new(weight: Vec<T>, bias: T) -> Self {
        Self { weight, bias }
    }

    pub fn inputs(&self) -> usize {
        self.weight.len()
    }

    pub fn weight(&self) -> &[T] {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut [T] {
        &mut self.weight
    }

    pub fn bias(&self) -> T {
        self.bias
    }

    pub fn bias_mut(&mut self) -> &mut T {
        &mut self.bias
    }

    pub fn parameter_count(&self) -> usize {
        self.weight.len() + 1
    }
}

/// `dot(w, v) + b`, the raw logit.
pub fn dense_forward<T: Scalar>(v: &[T], params: &DenseParams<T>) -> Result<T> {
    if v.len() != params.weight.len() {
        return Err(Error::LengthMismatch {
            what: "dense input",
            expected: params.weight.len(),
            found: v.len(),
        });
    }
    Ok(v.iter()
        .zip(&params.weight)
        .fold(params.bias, |acc, (&x, &w)| acc + x * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_selects() {
        let v = [0.5f64, -2.0, 7.0];
        let p = DenseParams::new(vec![0.0, 1.0, 0.0], 0.0);
        assert_eq!(dense_forward(&v, &p).unwrap(), -2.0);
    }

    #[test]
    fn zero_input_gives_bias() {
        let p = DenseParams::new(vec![3.0f64, 4.0], 1.5);
        assert_eq!(dense_forward(&[0.0, 0.0], &p).unwrap(), 1.5);
    }

    #[test]
    fn length_mismatch() {
        let p = DenseParams::<f32>::zeros(3);
        assert!(dense_forward(&[1.0, 2.0], &p).is_err());
    }
}
