//! Scalar abstraction for the numeric kernels.
//!
//! Interval bounds, cluster affinities, and document scores are written
//! against [`Real`] so they work for `f32` and `f64` alike. The pipeline
//! instantiates them at [`crate::Score`].

use std::fmt;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by the numeric kernels.
pub trait Real: Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync {
    /// Convert an integer count to the scalar type.
    fn from_count(count: u64) -> Self {
        // f32/f64 conversions from u64 never fail, they only round.
        Self::from_u64(count).expect("count representable as scalar")
    }

    /// 0.5 as the scalar type.
    fn half() -> Self {
        Self::from_f64(0.5).expect("0.5 representable as scalar")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_conversion_roundtrips_small_integers() {
        assert_eq!(<f64 as Real>::from_count(13_369), 13_369.0);
        assert_eq!(<f32 as Real>::from_count(99), 99.0f32);
    }

    #[test]
    fn half_is_exact() {
        assert_eq!(<f64 as Real>::half(), 0.5);
        assert_eq!(<f32 as Real>::half(), 0.5f32);
    }
}
