//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, ToPrimitive};

/// Real floating point type the geometry is computed in (`f32` or `f64`).
///
/// Everything complex in the crate is `Complex<T>` for some `T: Real`.
pub trait Real:
    RealField + Copy + FloatConst + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    /// Converts an integer count into `Self`.
    #[inline]
    fn count(n: usize) -> Self {
        nalgebra::convert(n as f64)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Real number embedded into the complex plane.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
