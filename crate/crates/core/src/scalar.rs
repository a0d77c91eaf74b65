use core::fmt::{Debug, Display};
use core::iter::Sum;

use num_traits::{Float, FloatConst};

/// Floating-point element type of tensors and parameters.
///
/// Training runs in `f32`; algebra tests and gradient checks run in `f64`.
pub trait Scalar:
    Float + FloatConst + Sum + Debug + Display + Default + Send + Sync + 'static
{
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}
