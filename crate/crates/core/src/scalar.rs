//! Scalar abstraction: all numeric code in this crate is generic over a
//! floating-point type implementing [`Real`]. Concrete `f64` aliases live at
//! the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Shorthand conversion from an `f64` literal.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Lossy conversion to `f64` (for reporting and error messages).
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Absolute tolerance for proportion and mass comparisons.
pub fn prop_tol<F: Real>() -> F {
    F::of(1e-9)
}

/// Absolute tolerance for LP feasibility decisions.
pub fn lp_tol<F: Real>() -> F {
    F::of(1e-7)
}

/// Snap a value to the nearest integer when it lies within `tol` of it.
pub fn snap_to_integer<F: Real>(v: F, tol: F) -> F {
    let r = v.round();
    if (v - r).abs() <= tol {
        r
    } else {
        v
    }
}

/// Floor after snapping near-integral values (guards against `2.9999999996`
/// flooring to 2 when the intended mass is 3).
pub fn fuzzy_floor<F: Real>(v: F, tol: F) -> F {
    snap_to_integer(v, tol).floor()
}

/// Ceiling after snapping near-integral values.
pub fn fuzzy_ceil<F: Real>(v: F, tol: F) -> F {
    snap_to_integer(v, tol).ceil()
}

/// True when `v` is within `tol` of an integer.
pub fn is_integral<F: Real>(v: F, tol: F) -> bool {
    (v - v.round()).abs() <= tol
}
