//! Scalar abstraction and small fixed-size vector helpers.
//!
//! Everything numerical in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Positions and momenta are plain
//! `[T; D]` arrays with `D` the spatial dimension.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by every module (classical flow, spectral
/// propagation, transport, constants).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated accumulator. Summation order is the caller's
/// iteration order, so results are reproducible for a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    let mut acc = CompensatedSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

pub mod vec {
    //! Arithmetic on `[T; D]`.
    use super::Real;

    #[inline]
    pub fn zero<T: Real, const D: usize>() -> [T; D] {
        [T::zero(); D]
    }

    #[inline]
    pub fn splat<T: Real, const D: usize>(v: T) -> [T; D] {
        [v; D]
    }

    #[inline]
    pub fn add<T: Real, const D: usize>(a: &[T; D], b: &[T; D]) -> [T; D] {
        std::array::from_fn(|i| a[i] + b[i])
    }

    #[inline]
    pub fn sub<T: Real, const D: usize>(a: &[T; D], b: &[T; D]) -> [T; D] {
        std::array::from_fn(|i| a[i] - b[i])
    }

    #[inline]
    pub fn scale<T: Real, const D: usize>(a: &[T; D], s: T) -> [T; D] {
        std::array::from_fn(|i| a[i] * s)
    }

    /// `a + s * b`
    #[inline]
    pub fn axpy<T: Real, const D: usize>(a: &[T; D], s: T, b: &[T; D]) -> [T; D] {
        std::array::from_fn(|i| a[i] + s * b[i])
    }

    #[inline]
    pub fn dot<T: Real, const D: usize>(a: &[T; D], b: &[T; D]) -> T {
        a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
    }

    #[inline]
    pub fn norm2<T: Real, const D: usize>(a: &[T; D]) -> T {
        dot(a, a)
    }

    #[inline]
    pub fn norm<T: Real, const D: usize>(a: &[T; D]) -> T {
        norm2(a).sqrt()
    }

    #[inline]
    pub fn dist<T: Real, const D: usize>(a: &[T; D], b: &[T; D]) -> T {
        norm(&sub(a, b))
    }

    #[inline]
    pub fn is_finite<T: Real, const D: usize>(a: &[T; D]) -> bool {
        a.iter().all(|x| x.is_finite())
    }

    /// Converts a slice into a fixed array; `None` on length mismatch.
    pub fn from_slice<T: Real, const D: usize>(s: &[T]) -> Option<[T; D]> {
        if s.len() != D {
            return None;
        }
        Some(std::array::from_fn(|i| s[i]))
    }

    pub fn to_f64<T: Real, const D: usize>(a: &[T; D]) -> Vec<f64> {
        a.iter().map(|x| x.to_f64_lossy()).collect()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (4 points).
pub(crate) fn gauss_legendre_4<T: Real>() -> [(T, T); 4] {
    let a = 0.339_981_043_584_856_3;
    let b = 0.861_136_311_594_052_6;
    let wa = 0.652_145_154_862_546_1;
    let wb = 0.347_854_845_137_453_9;
    [
        (T::lit(-b), T::lit(wb)),
        (T::lit(-a), T::lit(wa)),
        (T::lit(a), T::lit(wa)),
        (T::lit(b), T::lit(wb)),
    ]
}
