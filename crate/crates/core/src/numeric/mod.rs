//! Exact scalars.
//!
//! Everything above this module is generic over [`Scalar`]: an exact,
//! totally ordered field. Two implementations ship: [`Surd5`] (the field
//! `Q(sqrt 5)`, needed for golden-ratio instances) and [`Ratio`] for purely
//! rational work.

mod extended;
mod surd;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use extended::Extended;
pub use surd::{Surd5, SurdBase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithmeticError {
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid value string {0:?}")]
pub struct ParseValueError(pub String);

/// An exact ordered field element.
pub trait Scalar:
    Clone
    + Ord
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + std::str::FromStr<Err = ParseValueError>
{
    fn from_u64(n: u64) -> Self;

    /// `Some(n)` when the value is exactly the non-negative integer `n`.
    fn to_u64_exact(&self) -> Option<u64>;

    fn try_div(&self, rhs: &Self) -> Result<Self, ArithmeticError>;

    fn render_exact(&self) -> String;

    /// Correctly rounded (ties to even) with `digits` fractional digits.
    fn render_decimal(&self, digits: u32) -> String;

    fn to_f64(&self) -> f64;

    fn ratio(numer: u64, denom: u64) -> Self {
        Self::from_u64(numer) / Self::from_u64(denom)
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl<T: SurdBase> Scalar for Surd5<T> {
    fn from_u64(n: u64) -> Self {
        Surd5::from_integer(T::from_u64(n).expect("integer type too narrow"))
    }

    fn to_u64_exact(&self) -> Option<u64> {
        if self.is_rational() && self.rat().is_integer() {
            self.rat().numer().to_u64()
        } else {
            None
        }
    }

    fn try_div(&self, rhs: &Self) -> Result<Self, ArithmeticError> {
        Surd5::try_div(self, rhs)
    }

    fn render_exact(&self) -> String {
        Surd5::render_exact(self)
    }

    fn render_decimal(&self, digits: u32) -> String {
        Surd5::render_decimal(self, digits)
    }

    fn to_f64(&self) -> f64 {
        Surd5::to_f64(self)
    }
}

/// Rationals reuse the surd code paths with a zero `sqrt 5` coefficient.
impl<T: SurdBase> Scalar for RationalScalar<T> {
    fn from_u64(n: u64) -> Self {
        RationalScalar(Ratio::from_integer(T::from_u64(n).expect("integer type too narrow")))
    }

    fn to_u64_exact(&self) -> Option<u64> {
        if self.0.is_integer() {
            self.0.numer().to_u64()
        } else {
            None
        }
    }

    fn try_div(&self, rhs: &Self) -> Result<Self, ArithmeticError> {
        if rhs.0.is_zero() {
            Err(ArithmeticError::DivisionByZero)
        } else {
            Ok(RationalScalar(&self.0 / &rhs.0))
        }
    }

    fn render_exact(&self) -> String {
        surd::fmt_ratio(&self.0)
    }

    fn render_decimal(&self, digits: u32) -> String {
        Surd5::from_rational(self.0.clone()).render_decimal(digits)
    }

    fn to_f64(&self) -> f64 {
        Surd5::from_rational(self.0.clone()).to_f64()
    }
}

/// A rational number usable as a [`Scalar`].
///
/// Wraps [`Ratio`] so the crate can give it the value-string parser and
/// rendering that `Scalar` requires.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RationalScalar<T: SurdBase>(pub Ratio<T>);

impl<T: SurdBase> RationalScalar<T> {
    pub fn new(numer: T, denom: T) -> Self {
        RationalScalar(Ratio::new(numer, denom))
    }
}

impl<T: SurdBase> fmt::Display for RationalScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&surd::fmt_ratio(&self.0))
    }
}

impl<T: SurdBase> std::str::FromStr for RationalScalar<T> {
    type Err = ParseValueError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        surd::parse_ratio(s).map(RationalScalar).ok_or_else(|| ParseValueError(s.to_string()))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<T: SurdBase> $tr for RationalScalar<T> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                RationalScalar(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl<T: SurdBase> Neg for RationalScalar<T> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalScalar(-self.0)
    }
}

impl<T: SurdBase> Zero for RationalScalar<T> {
    fn zero() -> Self {
        RationalScalar(Ratio::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<T: SurdBase> One for RationalScalar<T> {
    fn one() -> Self {
        RationalScalar(Ratio::one())
    }
}

impl<T: SurdBase> RationalScalar<T> {
    pub fn abs(&self) -> Self {
        RationalScalar(self.0.abs())
    }
}

/// Sum of a slice of scalars.
pub fn sum<'a, S: Scalar>(it: impl IntoIterator<Item = &'a S>) -> S {
    it.into_iter().fold(S::zero(), |acc, x| acc + x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Value};
    use proptest::prelude::*;

    fn small_value() -> impl Strategy<Value = Value> {
        (-40i64..40, 1i64..12, -40i64..40, 1i64..12).prop_map(|(a, b, c, d)| {
            Value::new(Ratio::new(a.into(), b.into()), Ratio::new(c.into(), d.into()))
        })
    }

    proptest! {
        #[test]
        fn field_axioms(x in small_value(), y in small_value(), z in small_value()) {
            prop_assert_eq!((x.clone() + y.clone()) + z.clone(), x.clone() + (y.clone() + z.clone()));
            prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
            prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
            prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
            prop_assert_eq!(
                x.clone() * (y.clone() + z.clone()),
                x.clone() * y.clone() + x.clone() * z.clone()
            );
            if !x.is_zero() {
                prop_assert_eq!(x.clone() * x.checked_recip().unwrap(), Value::one());
            }
        }

        #[test]
        fn compare_matches_sign_of_difference(x in small_value(), y in small_value()) {
            prop_assert_eq!(x.cmp(&y), (x.clone() - y.clone()).cmp(&Value::zero()));
            prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
        }

        #[test]
        fn exact_render_round_trips(x in small_value()) {
            let text = Scalar::render_exact(&x);
            prop_assert_eq!(text.parse::<Value>().unwrap(), x);
        }

        #[test]
        fn decimal_render_is_within_half_ulp(x in small_value(), digits in 1u32..8) {
            let text = Scalar::render_decimal(&x, digits);
            let (int, frac) = text.split_once('.').unwrap();
            prop_assert_eq!(frac.len(), digits as usize);
            // parse the rendering back as an exact rational and bound the error
            let sign = if int.starts_with('-') { -1 } else { 1 };
            let digits_all = format!("{}{}", int.trim_start_matches('-'), frac);
            let scale = 10i64.pow(digits);
            let shown = Value::fraction((sign * digits_all.parse::<i64>().unwrap()).into(), scale.into());
            let err = x - shown;
            let half = Value::fraction(1.into(), (2 * scale).into());
            prop_assert!(err <= half.clone() && err >= -half);
        }
    }

    #[test]
    fn compare_agrees_with_floating_point() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..10_000 {
            let mut draw = || Ratio::new(rng.gen_range(-1000i64..1000).into(), rng.gen_range(1i64..50).into());
            let x = Value::new(draw(), draw());
            let y = Value::new(draw(), draw());
            let gap = x.to_f64() - y.to_f64();
            if gap.abs() > 1e-9 {
                checked += 1;
                assert_eq!(x.cmp(&y), gap.partial_cmp(&0.0).unwrap(), "{x} vs {y}");
            }
        }
        assert!(checked > 9_000);
    }

    #[test]
    fn rational_scalar_behaves() {
        let x: Rational = "3/4".parse().unwrap();
        let y = Rational::ratio(1, 4);
        assert_eq!(Scalar::render_exact(&(x.clone() + y.clone())), "1");
        assert_eq!((x.clone() + y).to_u64_exact(), Some(1));
        assert_eq!(x.render_decimal(1), "0.8");
        assert!("1/2*sqrt5".parse::<Rational>().is_err());
        assert_eq!(Scalar::try_div(&x, &Rational::zero()), Err(ArithmeticError::DivisionByZero));
    }
}
