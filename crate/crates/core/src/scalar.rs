use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar carried by every algebraic routine in the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Scale a tolerance tuned for `f64` to this type's precision.
    ///
    /// `power` is the exponent on the epsilon ratio: 1 for residual-type
    /// tolerances, 1/2 for tolerances on clustered roots.
    fn tol(tuned_for_f64: f64, power: f64) -> Self {
        let ratio = Self::epsilon() / Self::lit(f64::EPSILON);
        Self::lit(tuned_for_f64) * ratio.powf(Self::lit(power))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`].
pub type C<T> = Complex<T>;

#[cfg(test)]
#[inline]
pub(crate) fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
