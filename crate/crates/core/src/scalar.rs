use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used for weights, coefficients and amplitudes.
///
/// Implemented for `f32` and `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for file input and constants.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 converts to every float type")
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("float converts to f64")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_f64_lossy(n as f64)
    }

    /// Tolerance used when comparing accumulated sums of this type.
    fn default_tolerance() -> Self;
}

impl Scalar for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }
}

/// `|a - b| <= tol * (1 + max(|a|, |b|))`
pub(crate) fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    (a - b).abs() <= tol * (T::one() + a.abs().max(b.abs()))
}
