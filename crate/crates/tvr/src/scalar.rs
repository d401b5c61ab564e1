//! Integer scalar abstraction shared by all counter arithmetic.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Signed integer scalar used for counter values, displacements and
/// inequality-system coefficients.
///
/// Machine integers work for small models; the crate-root aliases pin
/// [`num_bigint::BigInt`] because the bound formulas (exponential in
/// `|Q|^3`) overflow any fixed-width type even on tiny inputs.
pub trait Scalar:
    Integer
    + Signed
    + FromPrimitive
    + ToPrimitive
    + ToBigInt
    + Clone
    + Hash
    + Debug
    + Display
    + 'static
{
    fn to_big(&self) -> BigInt {
        self.to_bigint().expect("integer scalar converts to BigInt")
    }
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + FromPrimitive
        + ToPrimitive
        + ToBigInt
        + Clone
        + Hash
        + Debug
        + Display
        + 'static
{
}

/// Converts an `i64` into the scalar type, panicking if it does not fit.
/// Every scalar admitted here holds at least the `i64` range except for
/// deliberately narrow test instantiations, which never see large values.
pub fn from_i64<S: Scalar>(v: i64) -> S {
    S::from_i64(v).expect("i64 value fits the scalar type")
}

/// Converts a `u32` into the scalar type. Always fits.
pub fn from_u32<S: Scalar>(v: u32) -> S {
    S::from_u32(v).expect("u32 value fits the scalar type")
}

/// Converts a `u64` count into the scalar type.
pub fn from_u64<S: Scalar>(v: u64) -> S {
    S::from_u64(v).expect("u64 value fits the scalar type")
}
