//! Scalar abstraction shared by the metric and diffusion code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the scoring and transmission math is generic over.
///
/// Implemented for `f32` and `f64`; the crate root re-exports `f64`
/// aliases for every generic type.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// One second expressed in days, the lower clamp for window spans.
    fn one_second_in_days() -> Self {
        Self::one() / cast::<Self, _>(SECONDS_PER_DAY)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) const SECONDS_PER_DAY: u32 = 86_400;

/// Converts a primitive into `F`. Every integer the crate feeds through here
/// is representable (possibly rounded) by both `f32` and `f64`.
pub(crate) fn cast<F: Scalar, T: ToPrimitive>(value: T) -> F {
    F::from(value).expect("primitive value representable as a float")
}

/// Sums `values` by recursive halving. The result depends only on the order
/// of `values`, never on how the work was scheduled.
pub fn pairwise_sum<F: Scalar>(values: &[F]) -> F {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        return values.iter().fold(F::zero(), |acc, &v| acc + v);
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}
