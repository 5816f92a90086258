//! Scalar field abstraction.
//!
//! All steppers, schemes and problems are generic over a [`Scalar`] field,
//! instantiated at `f64` for real problems and [`Complex64`] for complex
//! states or schemes with complex coefficients. The choice is made at
//! instantiation time; there is no runtime tagging of individual values.

use num_complex::{Complex64, ComplexFloat};
use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Field of scalars a state vector is made of.
///
/// Extends [`ComplexFloat`] (which supplies arithmetic, `conj`, `re`/`im`,
/// `abs`, `sqrt`, trigonometry, finiteness checks) with construction from
/// real and rectangular components.
pub trait Scalar:
    ComplexFloat<Real = f64>
    + AddAssign
    + SubAssign
    + MulAssign
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Whether the field can represent a nonzero imaginary part.
    const IS_COMPLEX: bool;

    /// Embeds a real number into the field.
    fn from_re(re: f64) -> Self;

    /// Builds an element from rectangular parts. Returns `None` when the
    /// field cannot carry the imaginary part (`f64` with `im != 0`).
    fn from_re_im(re: f64, im: f64) -> Option<Self>;

    /// Squared modulus `re² + im²` as a real number.
    #[inline]
    fn abs_sq(self) -> f64 {
        let (re, im) = (self.re(), self.im());
        re * re + im * im
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn from_re(re: f64) -> Self {
        re
    }

    #[inline]
    fn from_re_im(re: f64, im: f64) -> Option<Self> {
        (im == 0.0).then_some(re)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn from_re(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }

    #[inline]
    fn from_re_im(re: f64, im: f64) -> Option<Self> {
        Some(Complex64::new(re, im))
    }
}
