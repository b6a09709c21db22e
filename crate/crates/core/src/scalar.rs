//! Scalar abstraction for times and coordinates.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real number type used for times and coordinates.
///
/// Event times are roots of quadratics, so only floating point types qualify.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Time tolerance used to deduplicate roots at interval boundaries and to
    /// detect grazing contacts.
    fn tolerance() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Total order for finite values; NaN sorts last.
    fn total_order(self, other: Self) -> std::cmp::Ordering {
        self.partial_cmp(&other).unwrap_or_else(|| self.is_nan().cmp(&other.is_nan()))
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn total_order(self, other: Self) -> std::cmp::Ordering {
        self.total_cmp(&other)
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }

    fn total_order(self, other: Self) -> std::cmp::Ordering {
        self.total_cmp(&other)
    }
}

pub(crate) fn two<T: Scalar>() -> T {
    T::one() + T::one()
}
