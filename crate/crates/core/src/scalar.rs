//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the solvers are generic over.
///
/// Besides the arithmetic provided by [`Float`], each precision carries the
/// tolerances that would otherwise be hard-coded `f64` literals. They are
/// expressed relative to the precision so that an `f32` build does not chase
/// unreachable residuals.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Slack allowed when checking a descent certificate inequality.
    const CERT_TOL: Self;
    /// Relative tolerance of the symmetry probe on Hessian operators.
    const SYMMETRY_TOL: Self;
    /// Termination tolerance of the secular-equation root finders.
    const SECULAR_TOL: Self;
    /// Ritz residual tolerance (relative to the operator norm bound) in Lanczos.
    const RITZ_TOL: Self;
    /// Relative threshold below which a basis direction counts as dependent.
    const RANK_TOL: Self;

    /// Converts an `f64` literal. Panics only if the literal is not representable,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f64 {
    const CERT_TOL: f64 = 1e-9;
    const SYMMETRY_TOL: f64 = 1e-10;
    const SECULAR_TOL: f64 = 1e-10;
    const RITZ_TOL: f64 = 1e-8;
    const RANK_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const CERT_TOL: f32 = 1e-4;
    const SYMMETRY_TOL: f32 = 1e-4;
    const SECULAR_TOL: f32 = 1e-5;
    const RITZ_TOL: f32 = 1e-4;
    const RANK_TOL: f32 = 1e-6;
}

/// Returns true when every entry is finite.
pub fn all_finite<T: Real>(values: &[T]) -> bool {
    values.iter().all(|v| v.is_finite())
}
