//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, NumCast};

/// Real scalar type the game is evaluated over.
///
/// Implemented for `f32` and `f64`. The degeneracy tolerance is relative:
/// callers multiply it by the magnitude of the inputs involved.
pub trait Scalar: Float + Debug + Display + Default + Send + Sync + 'static {
    /// Relative tolerance below which a direction, a distance to a line or a
    /// leading polynomial coefficient is treated as zero.
    fn degeneracy_rel() -> Self;

    /// Absolute slack used by inequality oracles that hold exactly in real
    /// arithmetic (lemma bounds, fixed-point residuals).
    fn check_tol() -> Self;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn degeneracy_rel() -> Self {
        1e-12
    }

    #[inline]
    fn check_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn degeneracy_rel() -> Self {
        1e-5
    }

    #[inline]
    fn check_tol() -> Self {
        1e-4
    }
}

/// Absolute degeneracy threshold for inputs of the given magnitude.
#[inline]
pub(crate) fn degeneracy_tol<T: Scalar>(scale: T) -> T {
    T::degeneracy_rel() * scale
}
