use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Scalar field for the exact layer.
///
/// Anything rational-like works: `BigRational` is the default, `Rational64`
/// is fine for small orders where coefficients stay bounded.
pub trait Coeff:
    Clone
    + Debug
    + Display
    + PartialEq
    + Num
    + Signed
    + ToPrimitive
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Numerator/denominator pair as decimal strings.
    fn parts(&self) -> (String, String);
}

impl Coeff for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }

    fn parts(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}

impl Coeff for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn parts(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }
}
