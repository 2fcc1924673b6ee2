//! Scalar abstraction used throughout the crate.
//!
//! All numerical routines are generic over [`Real`], which any primitive
//! IEEE float satisfies. Concrete `f64` aliases live at the crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar: `f32`, `f64`, or anything float-like enough.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + 'static {}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Display + 'static {}

/// Converts an `f64` literal into `T`.
///
/// Panics only if `T` cannot represent any rounding of the literal, which
/// cannot happen for the primitive float types.
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Mixed absolute/relative tolerance: `rtol * max(1, |x|)`.
pub(crate) fn mixed_tol<T: Real>(rtol: T, x: T) -> T {
    rtol * T::one().max(x.abs())
}
