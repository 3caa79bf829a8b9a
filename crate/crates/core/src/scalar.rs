use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for similarity scores and latent factors.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless widening used by the binary model caches.
    fn to_f64_lossless(self) -> f64 {
        self.to_f64().expect("float widening cannot fail")
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable as any float")
    }

    /// Ordering for ranking: larger scores first, NaN treated as equal.
    fn rank_cmp(self, other: Self) -> std::cmp::Ordering {
        other.partial_cmp(&self).unwrap_or(std::cmp::Ordering::Equal)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
