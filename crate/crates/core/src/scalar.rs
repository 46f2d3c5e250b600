//! Scalar types usable as measure weights.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Signed;

/// A signed, ordered field element. Exact instantiations (`BigRational`,
/// `Rational64`) are what the verification campaigns use; `f64` is available
/// for quick numeric exploration where strict inequalities are not at stake.
pub trait Scalar: Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static {
    /// `num / den`. `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_reduce() {
        assert_eq!(BigRational::from_ratio(2, 4), BigRational::from_ratio(1, 2));
        assert_eq!(Rational64::from_ratio(-3, 6), Rational64::new(-1, 2));
        assert_eq!(f64::from_ratio(1, 4), 0.25);
        assert_eq!(BigRational::from_int(3).to_string(), "3");
    }
}
