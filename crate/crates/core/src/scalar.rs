//! Real scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real field the library computes over: `f32` or `f64`.
///
/// Complex arithmetic is done with [`num_complex::Complex<T>`], which nalgebra
/// treats as a `ComplexField` whose real field is `T`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding for narrower types.
    #[inline]
    fn cst(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal is representable")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize is representable")
    }

    #[inline]
    fn from_i64_lossy(x: i64) -> Self {
        <Self as FromPrimitive>::from_i64(x).expect("i64 is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// [`Real`] scalars usable with `rustfft`.
///
/// Kept separate from [`Real`] because `FftNum` brings `num_traits::Signed`
/// into scope, whose `abs` clashes with the nalgebra one in method syntax.
pub trait FftReal: Real + rustfft::FftNum {}

impl<T: Real + rustfft::FftNum> FftReal for T {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{2πiθ}`.
#[inline]
pub(crate) fn unit_phase<T: Real>(theta: T) -> Cx<T> {
    let a = T::two_pi() * theta;
    Complex::new(a.cos(), a.sin())
}

#[inline]
pub(crate) fn cabs<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub(crate) fn is_czero<T: Real>(z: Cx<T>) -> bool {
    z.re == T::zero() && z.im == T::zero()
}
