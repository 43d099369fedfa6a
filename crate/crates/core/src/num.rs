//! Integer scalar abstraction shared by the model IR and the solver.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{NumCast, PrimInt, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Signed machine integer usable as a coefficient or variable value.
///
/// Implemented for `i32`, `i64` and `i128`. All appendix models are integral,
/// so there is no floating point instantiation.
pub trait Scalar:
    PrimInt
    + Signed
    + Debug
    + Display
    + Hash
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossless conversion from an instance-data integer, if it fits.
    fn from_i64(v: i64) -> Option<Self> {
        <Self as NumCast>::from(v)
    }

    /// Widening conversion used for overflow-free activity sums.
    fn widen(self) -> i128 {
        self.to_i128().expect("scalar fits in i128")
    }

    /// Narrowing conversion back from an internal sum.
    fn narrow(v: i128) -> Option<Self> {
        <Self as NumCast>::from(v)
    }
}

impl Scalar for i32 {}
impl Scalar for i64 {}
impl Scalar for i128 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_respect_range() {
        assert_eq!(<i32 as Scalar>::from_i64(7), Some(7));
        assert_eq!(<i32 as Scalar>::from_i64(i64::MAX), None);
        assert_eq!(<i64 as Scalar>::narrow(i64::MAX as i128 + 1), None);
        assert_eq!(Scalar::widen(5i32), 5i128);
    }
}
