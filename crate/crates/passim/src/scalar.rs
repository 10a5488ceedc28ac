//! Scalar abstraction shared by all numerical kernels.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::Debug;
use std::iter::Sum;

/// Real floating point type the kernels are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }

    /// Converts an integer into `Self`.
    #[inline]
    fn int(v: i64) -> Self {
        Self::from_i64(v).unwrap()
    }

    /// Lossy conversion to `f64`, used for reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap()
    }

    /// Euler-Mascheroni constant.
    #[inline]
    fn euler_gamma() -> Self {
        Self::lit(0.577_215_664_901_532_9)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Scalar>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

/// `e^{i t}`.
#[inline]
pub(crate) fn cis<T: Scalar>(t: T) -> Cx<T> {
    let (s, c) = t.sin_cos();
    Complex::new(c, s)
}
