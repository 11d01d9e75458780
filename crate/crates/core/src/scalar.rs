//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the kernel can run on (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Default relative residual above which a Hermite system is rejected.
    fn default_residual_tolerance() -> Self;

    /// Converts a literal; every constant used by the kernel is representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_residual_tolerance() -> Self {
        1e-8
    }
}

impl Scalar for f32 {
    fn default_residual_tolerance() -> Self {
        1e-3
    }
}

/// Falling factorial `n (n-1) ... (n-r+1)` for a real `n`.
pub(crate) fn falling<T: Scalar>(n: T, r: usize) -> T {
    let mut acc = T::one();
    for k in 0..r {
        acc *= n - T::from_usize_lossy(k);
    }
    acc
}

pub(crate) fn factorial<T: Scalar>(r: usize) -> T {
    (1..=r).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k))
}

pub(crate) fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for j in 0..k {
        acc = acc * T::from_usize_lossy(n - j) / T::from_usize_lossy(j + 1);
    }
    acc
}
