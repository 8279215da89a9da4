//! Scalar abstraction: every engine in this crate is generic over a floating
//! point type implementing [`Real`].
//!
//! The crate root exports `f64` aliases for all public types; `f32` is
//! supported for callers that want to trade accuracy for footprint.  Stated
//! tolerances throughout the documentation are for `f64`; internal tolerances
//! widen automatically with the scalar's epsilon so that `f32` still
//! converges instead of spinning on unreachable thresholds.

use num_traits::Float;
use std::fmt::{Debug, Display};

/// Floating-point scalar usable by the solvers.
///
/// Implemented for `f32` and `f64`.  The two conversion helpers are infallible
/// for the finite constants this crate feeds them.
pub trait Real: Float + Debug + Display + Send + Sync + 'static {
    /// Converts a compile-time `f64` constant into `Self`.
    fn of(x: f64) -> Self;

    /// Widens `self` to `f64` (exact for both supported scalars).
    fn as_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// A tolerance that is `tol` for `f64` but never tighter than a few ulps of
/// the active scalar, so `f32` runs terminate.
#[inline]
pub(crate) fn scaled_tol<T: Real>(tol: f64) -> T {
    T::of(tol).max(T::epsilon() * T::of(16.0))
}
