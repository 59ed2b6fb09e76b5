//! Scalar abstractions shared by every numerical routine in the crate.
//!
//! All math is generic over a [`Real`] floating type (`f32` or `f64`) and over
//! a matrix entry type implementing [`Scalar`] (either the real type itself or
//! `Complex<T>`).

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};

/// Floating point type usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + LowerExp
    + FromPrimitive
    + ToPrimitive
    + Signed
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
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

    /// `self mod period` in `[0, period)`.
    #[inline]
    fn wrap(self, period: Self) -> Self {
        let r = self - period * (self / period).floor();
        if r >= period {
            Self::zero()
        } else {
            r
        }
    }

    /// A tolerance that never falls below a small multiple of the type's epsilon.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Matrix entry: either a [`Real`] or a `Complex` over one.
pub trait Scalar<T: Real>:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + 'static
{
    const IS_COMPLEX: bool;

    fn conj(self) -> Self;
    fn re(self) -> T;
    fn im(self) -> T;
    fn norm_sqr(self) -> T;
    fn from_real(x: T) -> Self;
    fn to_complex(self) -> Complex<T>;
    /// Real entry types keep only the real part.
    fn from_complex(z: Complex<T>) -> Self;

    #[inline]
    fn modulus(self) -> T {
        self.norm_sqr().sqrt()
    }

    #[inline]
    fn scale(self, x: T) -> Self {
        self * Self::from_real(x)
    }
}

impl<T: Real> Scalar<T> for T {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> T {
        self
    }
    #[inline]
    fn im(self) -> T {
        T::zero()
    }
    #[inline]
    fn norm_sqr(self) -> T {
        self * self
    }
    #[inline]
    fn from_real(x: T) -> Self {
        x
    }
    #[inline]
    fn to_complex(self) -> Complex<T> {
        Complex::new(self, T::zero())
    }
    #[inline]
    fn from_complex(z: Complex<T>) -> Self {
        z.re
    }
    #[inline]
    fn modulus(self) -> T {
        self.abs()
    }
}

impl<T: Real> Scalar<T> for Complex<T> {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn re(self) -> T {
        self.re
    }
    #[inline]
    fn im(self) -> T {
        self.im
    }
    #[inline]
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    #[inline]
    fn from_real(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    #[inline]
    fn to_complex(self) -> Complex<T> {
        self
    }
    #[inline]
    fn from_complex(z: Complex<T>) -> Self {
        z
    }
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn scale(self, x: T) -> Self {
        Complex::new(self.re * x, self.im * x)
    }
}
