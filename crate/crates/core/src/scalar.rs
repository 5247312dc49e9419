//! Scalar abstractions.
//!
//! Closed-form quantities (truncated cones, Ψ) only need field operations and
//! are written against [`Field`], which `f32`, `f64` and `BigRational` all
//! satisfy. Geometry needs square roots and tolerances and is written against
//! [`Real`].

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// An ordered field. Exact (`BigRational`) or floating point.
pub trait Field: Num + Clone + PartialOrd + FromPrimitive + Neg<Output = Self> + Debug {
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar type")
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl<T> Field for T where T: Num + Clone + PartialOrd + FromPrimitive + Neg<Output = T> + Debug {}

/// Floating-point scalar used by all geometric code.
pub trait Real:
    Field + Float + FloatConst + Display + Send + Sync + Default + 'static
{
    /// Converts an `f64` constant (tolerances, literals) into this type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// A tolerance of nominal size `base`, never below a few hundred ulps of
    /// the type. For `f64` this is `base` itself.
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        Self::lit(base).max(floor)
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Integer power for any field.
pub fn powi<T: Field>(base: &T, exp: usize) -> T {
    num_traits::pow(base.clone(), exp)
}
