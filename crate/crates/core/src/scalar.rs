//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the operators are generic over (`f32` or `f64`).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Rescales an absolute tolerance calibrated for `f64` to this type's
    /// machine epsilon. Identity for `f64`.
    fn tol(x: f64) -> Self {
        let ratio = Self::epsilon().to_f64_lossy() / f64::EPSILON;
        Self::lit(x * ratio.max(1.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier compensated summation.
pub fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    if sum.is_finite() {
        sum + comp
    } else {
        // Compensation terms are NaN once the running sum overflows.
        sum
    }
}
