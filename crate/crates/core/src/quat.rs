//! Quaternion scalars.
//!
//! A quaternion `q = q0 + q1 i + q2 j + q3 k` has a real part `q0` and three
//! imaginary parts along the units `i`, `j`, `k`, which satisfy
//! `i² = j² = k² = ijk = −1`. The only product used by the networks is the
//! Hamilton product, which is bilinear and non-commutative.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub q0: T,
    pub q1: T,
    pub q2: T,
    pub q3: T,
}

/// Products of basis units: `HAMILTON_TABLE[a][b] = (r, sign)` means
/// `e_a ⊗ e_b = sign · e_r` with `e = (1, i, j, k)`.
///
/// The quaternion convolution and its reverse pass are driven by this table.
pub const HAMILTON_TABLE: [[(usize, i8); 4]; 4] = [
    [(0, 1), (1, 1), (2, 1), (3, 1)],
    [(1, 1), (0, -1), (3, 1), (2, -1)],
    [(2, 1), (3, -1), (0, -1), (1, 1)],
    [(3, 1), (2, 1), (1, -1), (0, -1)],
];

impl<T: Scalar> Quaternion<T> {
    #[inline]
    pub const fn new(q0: T, q1: T, q2: T, q3: T) -> Self {
        Self { q0, q1, q2, q3 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn from_array(c: [T; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    /// Component-wise sum.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, q: Self) -> Self {
        Self::new(
            self.q0 + q.q0,
            self.q1 + q.q1,
            self.q2 + q.q2,
            self.q3 + q.q3,
        )
    }

    /// Hamilton product `self ⊗ q`.
    #[inline]
    pub fn hamilton(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.q0 * q.q0 - p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3,
            p.q0 * q.q1 + p.q1 * q.q0 + p.q2 * q.q3 - p.q3 * q.q2,
            p.q0 * q.q2 - p.q1 * q.q3 + p.q2 * q.q0 + p.q3 * q.q1,
            p.q0 * q.q3 + p.q1 * q.q2 - p.q2 * q.q1 + p.q3 * q.q0,
        )
    }

    #[inline]
    pub fn conjugate(self) -> Self {
        Self::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Complex-pair view `q = z0 + z1 j` with `z0 = q0 + q1 i`, `z1 = q2 + q3 i`.
    #[inline]
    pub fn split_complex(self) -> (Complex<T>, Complex<T>) {
        (
            Complex::new(self.q0, self.q1),
            Complex::new(self.q2, self.q3),
        )
    }

    /// Inverse of [`Quaternion::split_complex`].
    #[inline]
    pub fn from_complex_pair(z0: Complex<T>, z1: Complex<T>) -> Self {
        Self::new(z0.re, z0.im, z1.re, z1.im)
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Quaternion::add(self, rhs)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Quaternion::add(self, -rhs)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

/// `p * q` is the Hamilton product `p ⊗ q`.
impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.hamilton(rhs)
    }
}
