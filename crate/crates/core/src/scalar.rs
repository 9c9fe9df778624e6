//! Scalar abstraction for the numeric kernels.
//!
//! All distance, estimation, and weighting math is written against [`Real`]
//! so the same code runs in `f32` or `f64`. The crate root exports `f64`
//! aliases for the common case; experiment and file-format code is pinned
//! to `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use rand::distr::uniform::SampleUniform;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + SampleUniform + Sum + Debug + Display + Send + Sync + 'static
{
    /// Cast an `f64` constant into the scalar type.
    fn of(x: f64) -> Self;

    /// Widen to `f64` for reporting and serialization.
    fn as_f64(self) -> f64;

    /// One standard normal draw.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
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

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        f64::from(self)
    }

    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}
